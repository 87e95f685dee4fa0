#pragma once

#include <array>
#include <span>

namespace interfere::stats {

/// Sample Pearson correlation. Throws undefined-correlation when either side has zero variance.
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

/// Sample standard deviation (n-1 denominator) over the mean. A single value yields 0.
[[nodiscard]] double coefficient_of_variation(std::span<const double> values);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sided p-value of a Student t statistic.
[[nodiscard]] double student_t_two_sided_p(double t, double dof);

/// Upper tail of the F(d1, d2) distribution.
[[nodiscard]] double f_survival(double f, double d1, double d2);

/// Upper tail of the chi-squared distribution.
[[nodiscard]] double chi_squared_survival(double x, double dof);

/// Pearson correlation with the two-sided t-test p-value of H0: rho = 0.
[[nodiscard]] TestResult correlation_test(std::span<const double> x, std::span<const double> y);

/**
 * Jarque-Bera normality test, JB = n/6 · (S² + (K-3)²/4) with moment-based
 * skewness S and kurtosis K; chi-squared with 2 degrees of freedom under H0.
 */
[[nodiscard]] TestResult jarque_bera(std::span<const double> values);

/**
 * Studentized (Koenker) Breusch-Pagan test: regresses squared residuals on an
 * intercept plus the given regressors and reports n·R² against a chi-squared
 * with as many degrees of freedom as independent regressors.
 */
[[nodiscard]] TestResult breusch_pagan(std::span<const double> residuals,
                                       std::span<const std::array<double, 3>> regressors);

}  // namespace interfere::stats
