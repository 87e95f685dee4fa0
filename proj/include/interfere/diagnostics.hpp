#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace interfere {

/// Goodness-of-fit and inference results attached to a fitted model.
///
/// R² follows the through-origin convention, 1 - SSE / Σy², because the
/// model has no intercept.
struct FitDiagnostics {
    std::size_t n = 0;  ///< rows used in the fit
    std::size_t k = 0;  ///< fitted coefficients
    double r2 = 0.0;
    double r2_adj = 0.0;
    double sse = 0.0;
    double ssr = 0.0;  ///< Σ fitted², uncentered
    double f_statistic = 0.0;
    double f_pvalue = 1.0;
    std::array<double, 3> std_errors{};
    std::array<double, 3> t_statistics{};
    std::array<double, 3> t_pvalues{};
    std::vector<double> residuals;
    std::vector<double> fitted;
    std::vector<std::array<double, 3>> regressors;  ///< (t1, t2, t3) per row, for residual tests
    double normality_pvalue = 1.0;
    double heteroscedasticity_pvalue = 1.0;
};

}  // namespace interfere
