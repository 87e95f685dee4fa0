#include "interfere/stats.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "interfere/error.hpp"

namespace interfere::stats {

namespace {

double mean(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorKind::Domain, "pearson needs equal-length samples");
    }
    if (x.size() < 2) {
        throw Error(ErrorKind::InsufficientData, "pearson needs at least two points");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw Error(ErrorKind::UndefinedCorrelation, "correlation undefined for a constant sample");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double coefficient_of_variation(std::span<const double> values) {
    if (values.empty()) {
        throw Error(ErrorKind::Domain, "coefficient of variation of an empty sample");
    }
    const double m = mean(values);
    if (m == 0.0) {
        throw Error(ErrorKind::Domain, "coefficient of variation undefined for zero mean");
    }
    if (values.size() == 1) return 0.0;
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1)) / m;
}

double student_t_two_sided_p(double t, double dof) {
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    // P(|T| > t) = I_{dof/(dof+t²)}(dof/2, 1/2)
    return boost::math::ibeta(dof / 2.0, 0.5, dof / (dof + t * t));
}

double f_survival(double f, double d1, double d2) {
    if (std::isnan(f)) return 1.0;
    if (std::isinf(f)) return 0.0;
    if (f <= 0.0) return 1.0;
    return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double chi_squared_survival(double x, double dof) {
    if (std::isnan(x)) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

TestResult correlation_test(std::span<const double> x, std::span<const double> y) {
    const double r = pearson(x, y);
    const double dof = static_cast<double>(x.size()) - 2.0;
    if (dof <= 0.0) return {r, 1.0};
    const double denom = 1.0 - r * r;
    if (denom <= 0.0) return {r, 0.0};
    return {r, student_t_two_sided_p(r * std::sqrt(dof / denom), dof)};
}

TestResult jarque_bera(std::span<const double> values) {
    if (values.size() < 4) {
        throw Error(ErrorKind::InsufficientData, "Jarque-Bera needs at least four values");
    }
    const double n = static_cast<double>(values.size());
    const double m = mean(values);
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : values) {
        const double d = v - m;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 == 0.0) {
        // Degenerate: a constant sample carries no evidence against normality.
        return {0.0, 1.0};
    }
    const double skew = m3 / std::pow(m2, 1.5);
    const double excess = m4 / (m2 * m2) - 3.0;
    const double jb = n / 6.0 * (skew * skew + excess * excess / 4.0);
    return {jb, chi_squared_survival(jb, 2.0)};
}

TestResult breusch_pagan(std::span<const double> residuals,
                         std::span<const std::array<double, 3>> regressors) {
    const auto n = static_cast<Eigen::Index>(residuals.size());
    if (regressors.size() != residuals.size()) {
        throw Error(ErrorKind::Domain, "Breusch-Pagan needs one regressor row per residual");
    }
    if (n < 5) {
        throw Error(ErrorKind::InsufficientData, "Breusch-Pagan needs at least five residuals");
    }
    Eigen::MatrixXd z(n, 4);
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        z(i, 0) = 1.0;
        for (int j = 0; j < 3; ++j) z(i, j + 1) = regressors[row][static_cast<std::size_t>(j)];
        u(i) = residuals[row] * residuals[row];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
    qr.setThreshold(1e-10);
    const Eigen::Index dof = qr.rank() - 1;
    if (dof < 1) return {0.0, 1.0};
    const Eigen::VectorXd fitted = z * qr.solve(u);
    const double u_mean = u.mean();
    const double sst = (u.array() - u_mean).square().sum();
    if (sst == 0.0) return {0.0, 1.0};
    const double sse = (u - fitted).squaredNorm();
    const double lm = static_cast<double>(n) * (1.0 - sse / sst);
    return {lm, chi_squared_survival(lm, static_cast<double>(dof))};
}

}  // namespace interfere::stats
