#include "interfere/regression.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "interfere/error.hpp"
#include "interfere/stats.hpp"

namespace interfere {

namespace {

constexpr std::array<const char*, 3> kTermNames{"t1", "t2", "t3"};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::MatrixXd design_matrix(const std::vector<std::array<double, 3>>& regressors) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(regressors.size()), 3);
    for (std::size_t i = 0; i < regressors.size(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = regressors[i][j];
        }
    }
    return x;
}

// Names the columns taking part in the near-null direction of the design.
std::string dependent_columns(const Eigen::JacobiSVD<Eigen::MatrixXd>& svd) {
    const Eigen::VectorXd null_direction = svd.matrixV().col(2);
    std::ostringstream names;
    bool first = true;
    for (Eigen::Index j = 0; j < 3; ++j) {
        if (std::abs(null_direction(j)) > 1e-6) {
            names << (first ? "" : ",") << kTermNames[static_cast<std::size_t>(j)];
            first = false;
        }
    }
    return names.str();
}

}  // namespace

FitDiagnostics diagnose(const std::vector<std::array<double, 3>>& regressors,
                        const std::vector<double>& observed,
                        const std::array<double, 3>& coefficients) {
    if (regressors.size() != observed.size()) {
        throw Error(ErrorKind::Domain, "one observation is needed per regressor row");
    }
    FitDiagnostics diag;
    diag.n = observed.size();
    diag.k = 3;
    diag.regressors = regressors;
    diag.fitted.resize(diag.n);
    diag.residuals.resize(diag.n);

    double syy = 0.0;
    for (std::size_t i = 0; i < diag.n; ++i) {
        const auto& t = regressors[i];
        const double fitted =
            coefficients[0] * t[0] + coefficients[1] * t[1] + coefficients[2] * t[2];
        diag.fitted[i] = fitted;
        diag.residuals[i] = observed[i] - fitted;
        diag.sse += diag.residuals[i] * diag.residuals[i];
        diag.ssr += fitted * fitted;
        syy += observed[i] * observed[i];
    }

    if (syy > 0.0) {
        diag.r2 = 1.0 - diag.sse / syy;
    } else {
        diag.r2 = diag.sse == 0.0 ? 1.0 : 0.0;
    }
    diag.r2_adj = diag.n > diag.k + 1 ? r2_adjusted(diag, diag.n, diag.k) : kNaN;

    const double resid_dof = static_cast<double>(diag.n) - static_cast<double>(diag.k);
    if (resid_dof > 0.0) {
        const double sigma2 = diag.sse / resid_dof;
        if (diag.sse == 0.0) {
            diag.f_statistic = diag.ssr > 0.0 ? std::numeric_limits<double>::infinity() : kNaN;
        } else {
            diag.f_statistic = (diag.ssr / static_cast<double>(diag.k)) / sigma2;
        }
        diag.f_pvalue =
            stats::f_survival(diag.f_statistic, static_cast<double>(diag.k), resid_dof);

        const Eigen::MatrixXd x = design_matrix(regressors);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
        const Eigen::VectorXd s = svd.singularValues();
        const bool invertible = s(2) > 0.0 && s(0) / s(2) <= kConditionLimit;
        for (std::size_t j = 0; j < 3; ++j) {
            if (!invertible) {
                diag.std_errors[j] = kNaN;
                diag.t_statistics[j] = kNaN;
                diag.t_pvalues[j] = 1.0;
                continue;
            }
            // (XᵀX)⁻¹_jj = Σ_m V_jm² / s_m²
            double inv_jj = 0.0;
            for (Eigen::Index m = 0; m < 3; ++m) {
                const double v = svd.matrixV()(static_cast<Eigen::Index>(j), m);
                inv_jj += v * v / (s(m) * s(m));
            }
            diag.std_errors[j] = std::sqrt(sigma2 * inv_jj);
            const double coef = coefficients[j];
            if (diag.std_errors[j] == 0.0) {
                diag.t_statistics[j] =
                    coef == 0.0 ? kNaN : std::copysign(std::numeric_limits<double>::infinity(), coef);
            } else {
                diag.t_statistics[j] = coef / diag.std_errors[j];
            }
            diag.t_pvalues[j] = stats::student_t_two_sided_p(diag.t_statistics[j], resid_dof);
        }
    } else {
        diag.f_statistic = kNaN;
        diag.f_pvalue = 1.0;
        diag.std_errors.fill(kNaN);
        diag.t_statistics.fill(kNaN);
        diag.t_pvalues.fill(1.0);
    }

    if (diag.n >= kMinResidualsForChecks) {
        const ResidualReport report = residual_checks(diag);
        diag.normality_pvalue = report.normality.p_value;
        diag.heteroscedasticity_pvalue = report.homoscedasticity.p_value;
    } else {
        diag.normality_pvalue = kNaN;
        diag.heteroscedasticity_pvalue = kNaN;
    }
    return diag;
}

InterferenceModel fit(const InterferenceDataset& dataset, FitOptions options) {
    std::vector<std::array<double, 3>> regressors;
    std::vector<double> observed;
    for (const DatasetRow& row : dataset.rows) {
        if (!row.ok() || !std::isfinite(row.observed)) continue;
        regressors.push_back({row.features.t1, row.features.t2, row.features.t3});
        observed.push_back(options.floor_negative ? std::max(0.0, row.observed) : row.observed);
    }
    if (observed.size() < kMinFitRows) {
        throw Error(ErrorKind::InsufficientData,
                    "fitting needs at least " + std::to_string(kMinFitRows) + " usable rows, got " +
                        std::to_string(observed.size()));
    }

    const Eigen::MatrixXd x = design_matrix(regressors);
    const Eigen::Map<const Eigen::VectorXd> y(observed.data(),
                                              static_cast<Eigen::Index>(observed.size()));

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();
    if (!(s(2) > 0.0) || s(0) / s(2) > kConditionLimit) {
        throw Error(ErrorKind::Collinearity,
                    "design matrix is rank deficient; dependent columns: " + dependent_columns(svd));
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < 3) {
        throw Error(ErrorKind::Collinearity,
                    "design matrix is rank deficient; dependent columns: " + dependent_columns(svd));
    }
    const Eigen::Vector3d beta = qr.solve(y);

    InterferenceModel model;
    model.c1 = beta(0);
    model.c2 = beta(1);
    model.c3 = beta(2);
    model.provenance = Provenance::Fitted;
    model.diagnostics = diagnose(regressors, observed, {model.c1, model.c2, model.c3});
    return model;
}

double r2_adjusted(const FitDiagnostics& diag, std::size_t n, std::size_t k) {
    if (k < 1 || n <= k + 1) {
        throw Error(ErrorKind::DegreesOfFreedom,
                    "adjusted R² needs n > k + 1 (n=" + std::to_string(n) +
                        ", k=" + std::to_string(k) + ")");
    }
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    return 1.0 - (1.0 - diag.r2) * (nn - 1.0) / (nn - kk - 1.0);
}

SignificanceReport significance(const FitDiagnostics& diag, double alpha) {
    SignificanceReport report;
    report.alpha = alpha;
    report.f_statistic = diag.f_statistic;
    report.f_pvalue = diag.f_pvalue;
    report.regression_significant = diag.f_pvalue < alpha;
    report.t_pvalues = diag.t_pvalues;
    for (std::size_t j = 0; j < 3; ++j) {
        report.coefficient_significant[j] = diag.t_pvalues[j] < alpha;
    }
    return report;
}

ResidualReport residual_checks(const FitDiagnostics& diag, double alpha) {
    if (diag.residuals.size() < kMinResidualsForChecks) {
        throw Error(ErrorKind::InsufficientData,
                    "residual checks need at least " + std::to_string(kMinResidualsForChecks) +
                        " residuals");
    }
    ResidualReport report;

    report.linearity.name = "linearity (residual-vs-fitted correlation proxy)";
    try {
        const stats::TestResult corr = stats::correlation_test(diag.residuals, diag.fitted);
        report.linearity.statistic = corr.statistic;
        report.linearity.p_value = corr.p_value;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UndefinedCorrelation) throw;
        // Constant residuals or fitted values: no linear trend to detect.
        report.linearity.statistic = 0.0;
        report.linearity.p_value = 1.0;
    }
    report.linearity.passed = report.linearity.p_value > alpha;

    report.homoscedasticity.name = "homoscedasticity (Breusch-Pagan)";
    const stats::TestResult bp = stats::breusch_pagan(diag.residuals, diag.regressors);
    report.homoscedasticity.statistic = bp.statistic;
    report.homoscedasticity.p_value = bp.p_value;
    report.homoscedasticity.passed = bp.p_value > alpha;

    report.normality.name = "normality (Jarque-Bera)";
    const stats::TestResult jb = stats::jarque_bera(diag.residuals);
    report.normality.statistic = jb.statistic;
    report.normality.p_value = jb.p_value;
    report.normality.passed = jb.p_value > alpha;
    return report;
}

}  // namespace interfere
