#include "interfere/model.hpp"

#include <cmath>

#include "interfere/error.hpp"

namespace interfere {

std::string_view provenance_name(Provenance provenance) noexcept {
    return provenance == Provenance::PaperDefault ? "paper-default" : "fitted";
}

Provenance parse_provenance(std::string_view text) {
    if (text == "paper-default") return Provenance::PaperDefault;
    if (text == "fitted") return Provenance::Fitted;
    throw Error(ErrorKind::Load, "unknown model provenance '" + std::string(text) + "'");
}

InterferenceModel InterferenceModel::paper_default() {
    return InterferenceModel{0.7498, 0.1598, 0.1456, Provenance::PaperDefault, std::nullopt};
}

FeatureRow features_from_aggregates(const ResourceVector& accumulated,
                                    const ResourceVector& similarity) {
    FeatureRow row;
    row.accumulated = accumulated;
    row.similarity = similarity;
    row.t1 = accumulated.sllc * similarity.sllc;
    row.t2 = accumulated.net * similarity.net;
    row.t3 = accumulated.dram * accumulated.sllc * similarity.sllc;
    return row;
}

FeatureRow features(const CoLocation& coloc) {
    ResourceVector accumulated{0.0, 0.0, 0.0, Units::Score};
    ResourceVector similarity{0.0, 0.0, 0.0, Units::Score};
    for (ResourceKind kind : kAllResources) {
        accumulated[kind] = accumulated_access(coloc, kind);
        similarity[kind] = global_similarity(coloc, kind);
    }
    FeatureRow row = features_from_aggregates(accumulated, similarity);
    row.labels = coloc.labels();
    return row;
}

double predict(const InterferenceModel& model, const FeatureRow& row) {
    const double value = model.c1 * row.t1 + model.c2 * row.t2 + model.c3 * row.t3;
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::Domain, "prediction is not finite");
    }
    return value;
}

double prediction_error(double predicted, double observed) {
    if (!std::isfinite(predicted) || !std::isfinite(observed)) {
        throw Error(ErrorKind::Domain, "prediction error of non-finite values");
    }
    return std::abs(predicted - observed);
}

bool is_extrapolation(double prediction) noexcept {
    return prediction < 0.0 || prediction > kTrainingEnvelopeMax;
}

}  // namespace interfere
