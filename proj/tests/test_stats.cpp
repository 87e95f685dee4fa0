#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "interfere/stats.hpp"

using namespace interfere;
using testing::error_of;

TEST_CASE("pearson") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(stats::pearson(x, std::vector<double>{3, 5, 7, 9}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(stats::pearson(x, std::vector<double>{-1, -2, -3, -4}) ==
          doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(stats::pearson(x, std::vector<double>{1, 3, 2, 4}) - 0.8) < 1e-12);
}

TEST_CASE("pearson rejects zero variance and mismatched input") {
    const std::vector<double> x{1, 2, 3};
    CHECK(error_of([&] { (void)stats::pearson(x, std::vector<double>{2, 2, 2}); }) ==
          ErrorKind::UndefinedCorrelation);
    CHECK(error_of([&] { (void)stats::pearson(x, std::vector<double>{1, 2}); }) == ErrorKind::Domain);
}

TEST_CASE("pearson is invariant under positive affine maps") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(30), y(30), xa(30), ya(30);
        const double a = scale(rng), b = normal(rng) * 5, c = scale(rng), d = normal(rng) * 5;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = normal(rng);
            y[i] = 0.5 * x[i] + normal(rng);
            xa[i] = a * x[i] + b;
            ya[i] = c * y[i] + d;
        }
        CHECK(std::abs(stats::pearson(xa, ya) - stats::pearson(x, y)) < 1e-12);
    }
}

TEST_CASE("coefficient_of_variation") {
    CHECK(stats::coefficient_of_variation(std::vector<double>{3, 3, 3}) == 0.0);
    CHECK(stats::coefficient_of_variation(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) ==
          doctest::Approx(0.4276).epsilon(1e-4));
    CHECK(stats::coefficient_of_variation(std::vector<double>{42}) == 0.0);
    CHECK(error_of([] { (void)stats::coefficient_of_variation(std::vector<double>{-1, 1}); }) ==
          ErrorKind::Domain);
    CHECK(error_of([] { (void)stats::coefficient_of_variation(std::vector<double>{}); }) ==
          ErrorKind::Domain);
}

TEST_CASE("distribution tails match reference values") {
    // Reference values from standard statistical tables.
    CHECK(stats::student_t_two_sided_p(2.228138851986, 10) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(stats::student_t_two_sided_p(0.0, 5) == doctest::Approx(1.0));
    CHECK(stats::f_survival(3.70826, 3, 10) == doctest::Approx(0.05).epsilon(1e-5));
    CHECK(stats::chi_squared_survival(5.991464547, 2) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(stats::chi_squared_survival(7.814727903, 3) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(stats::f_survival(std::numeric_limits<double>::infinity(), 3, 10) == 0.0);
}

TEST_CASE("jarque_bera matches the closed form") {
    const std::vector<double> v{1, 2, 3, 4, 10};
    // skewness and kurtosis by hand: mean 4, m2 = 10, m3 = 36, m4 = 278.8
    const double s = 36.0 / std::pow(10.0, 1.5);
    const double k = 278.8 / 100.0;
    const double jb = 5.0 / 6.0 * (s * s + (k - 3) * (k - 3) / 4);
    const stats::TestResult r = stats::jarque_bera(v);
    CHECK(r.statistic == doctest::Approx(jb).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(std::exp(-jb / 2)).epsilon(1e-12));
}

TEST_CASE("jarque_bera accepts normal samples") {
    int accepted = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        std::vector<double> v(500);
        for (double& x : v) x = normal(rng);
        accepted += stats::jarque_bera(v).p_value > 0.05;
    }
    CHECK(accepted >= 90);
}

TEST_CASE("jarque_bera rejects skewed samples") {
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> v(500);
    for (double& x : v) x = expo(rng);
    CHECK(stats::jarque_bera(v).p_value < 1e-6);
}

TEST_CASE("correlation_test p-value") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<double> y{2, 1, 4, 3, 6, 5, 8, 7, 10, 9};
    const stats::TestResult r = stats::correlation_test(x, y);
    const double rho = r.statistic;
    const double t = rho * std::sqrt(8.0 / (1 - rho * rho));
    CHECK(r.p_value == doctest::Approx(stats::student_t_two_sided_p(t, 8)).epsilon(1e-12));
    CHECK(r.p_value < 0.001);
}

TEST_CASE("breusch_pagan on a hand-checkable design") {
    // e² regressed on [1, t1] with e² = 1 + t1 exactly: R² = 1, statistic = n.
    std::vector<std::array<double, 3>> regressors;
    std::vector<double> residuals;
    for (int i = 0; i < 10; ++i) {
        const double t1 = i;
        regressors.push_back({t1, 2 * t1, 3 * t1});
        residuals.push_back(std::sqrt(1 + t1) * (i % 2 ? 1 : -1));
    }
    const stats::TestResult r = stats::breusch_pagan(residuals, regressors);
    CHECK(r.statistic == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(r.p_value == doctest::Approx(stats::chi_squared_survival(10.0, 1)).epsilon(1e-9));
}
