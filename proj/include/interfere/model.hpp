#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interfere/core.hpp"
#include "interfere/diagnostics.hpp"

namespace interfere {

enum class Provenance { PaperDefault, Fitted };

[[nodiscard]] std::string_view provenance_name(Provenance provenance) noexcept;
[[nodiscard]] Provenance parse_provenance(std::string_view text);

/// Three-term interference model without intercept:
///   I = c1·T_sllc·G_sllc + c2·T_net·G_net + c3·T_dram·T_sllc·G_sllc
struct InterferenceModel {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    Provenance provenance = Provenance::Fitted;
    std::optional<FitDiagnostics> diagnostics;

    /// The published coefficients, stored to the four decimals they were reported with.
    [[nodiscard]] static InterferenceModel paper_default();
};

/// Largest interference level in the reference training data; predictions
/// beyond it (or below 0) are extrapolations.
inline constexpr double kTrainingEnvelopeMax = 1.89;

struct FeatureRow {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    ResourceVector accumulated{0.0, 0.0, 0.0, Units::Score};  ///< T_s per resource
    ResourceVector similarity{1.0, 1.0, 1.0, Units::Score};   ///< G_s per resource
    std::vector<std::string> labels;
};

/// Model terms from accumulated access and global similarity vectors.
[[nodiscard]] FeatureRow features_from_aggregates(const ResourceVector& accumulated,
                                                  const ResourceVector& similarity);

[[nodiscard]] FeatureRow features(const CoLocation& coloc);

[[nodiscard]] double predict(const InterferenceModel& model, const FeatureRow& row);

[[nodiscard]] double prediction_error(double predicted, double observed);

[[nodiscard]] bool is_extrapolation(double prediction) noexcept;

}  // namespace interfere
