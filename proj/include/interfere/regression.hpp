#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "interfere/diagnostics.hpp"
#include "interfere/model.hpp"

namespace interfere {

/// One co-location's features and the interference level observed for it.
struct DatasetRow {
    FeatureRow features;
    double observed = 0.0;  ///< NaN when the co-execution failed
    std::string error;      ///< empty unless the co-execution failed

    [[nodiscard]] bool ok() const noexcept { return error.empty(); }
};

struct InterferenceDataset {
    std::vector<DatasetRow> rows;
    std::string calibration_id;
    std::string generated;
};

inline constexpr std::size_t kMinFitRows = 4;
/// Fits whose design matrix condition number exceeds this are treated as collinear.
inline constexpr double kConditionLimit = 1e10;
inline constexpr std::size_t kMinResidualsForChecks = 8;

struct FitOptions {
    /// Floor observed interference at zero before fitting (negative slowdowns are noise).
    bool floor_negative = false;
};

/**
 * Least-squares fit of the three-term model without intercept.
 *
 * Rows flagged with an error are skipped. Throws insufficient-data below four
 * usable rows and collinearity (naming the dependent columns) when the design
 * matrix is rank deficient or its condition number exceeds kConditionLimit.
 */
[[nodiscard]] InterferenceModel fit(const InterferenceDataset& dataset, FitOptions options = {});

/// Diagnostics for given coefficients over a design; exposed so callers can
/// assess arbitrary coefficient triples.
[[nodiscard]] FitDiagnostics diagnose(const std::vector<std::array<double, 3>>& regressors,
                                      const std::vector<double>& observed,
                                      const std::array<double, 3>& coefficients);

/// 1 - (1 - R²)(n - 1)/(n - k - 1). Throws degrees-of-freedom when n <= k + 1.
[[nodiscard]] double r2_adjusted(const FitDiagnostics& diag, std::size_t n, std::size_t k);

struct SignificanceReport {
    double alpha = 0.05;
    double f_statistic = 0.0;
    double f_pvalue = 1.0;
    bool regression_significant = false;
    std::array<double, 3> t_pvalues{};
    std::array<bool, 3> coefficient_significant{};
};

[[nodiscard]] SignificanceReport significance(const FitDiagnostics& diag, double alpha);

struct ResidualCheck {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
    bool passed = false;
};

struct ResidualReport {
    /// Correlation of residuals with fitted values; a proxy for the linearity assumption.
    ResidualCheck linearity;
    ResidualCheck homoscedasticity;  ///< Breusch-Pagan
    ResidualCheck normality;         ///< Jarque-Bera

    [[nodiscard]] bool all_passed() const noexcept {
        return linearity.passed && homoscedasticity.passed && normality.passed;
    }
};

[[nodiscard]] ResidualReport residual_checks(const FitDiagnostics& diag, double alpha = 0.05);

}  // namespace interfere
