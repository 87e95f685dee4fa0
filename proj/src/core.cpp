#include "interfere/core.hpp"

#include <algorithm>
#include <cmath>

#include "interfere/error.hpp"

namespace interfere {

namespace {

// Accumulated floating-point error tolerated when checking score bounds.
constexpr double kScoreSlack = 1e-9;

void require_score(const ApplicationProfile& profile) {
    if (profile.units() != Units::Score) {
        throw Error(ErrorKind::UnitMismatch,
                    "profile '" + profile.label + "' holds raw rates; scores are required");
    }
}

}  // namespace

std::string_view resource_name(ResourceKind kind) noexcept {
    switch (kind) {
        case ResourceKind::Sllc: return "sllc";
        case ResourceKind::Dram: return "dram";
        case ResourceKind::Net: return "net";
    }
    return "?";
}

std::string_view units_name(Units units) noexcept {
    return units == Units::Raw ? "raw" : "score";
}

Units parse_units(std::string_view text) {
    if (text == "raw") return Units::Raw;
    if (text == "score") return Units::Score;
    throw Error(ErrorKind::MalformedProfile, "unknown units '" + std::string(text) + "'");
}

double ResourceVector::operator[](ResourceKind kind) const noexcept {
    switch (kind) {
        case ResourceKind::Sllc: return sllc;
        case ResourceKind::Dram: return dram;
        case ResourceKind::Net: return net;
    }
    return 0.0;
}

double& ResourceVector::operator[](ResourceKind kind) noexcept {
    switch (kind) {
        case ResourceKind::Dram: return dram;
        case ResourceKind::Net: return net;
        case ResourceKind::Sllc: break;
    }
    return sllc;
}

ResourceVector operator+(const ResourceVector& lhs, const ResourceVector& rhs) {
    if (lhs.units != rhs.units) {
        throw Error(ErrorKind::UnitMismatch, "cannot add raw rates to scores");
    }
    return {lhs.sllc + rhs.sllc, lhs.dram + rhs.dram, lhs.net + rhs.net, lhs.units};
}

double CalibrationMaxima::operator[](ResourceKind kind) const noexcept {
    switch (kind) {
        case ResourceKind::Sllc: return max_sllc;
        case ResourceKind::Dram: return max_dram;
        case ResourceKind::Net: return max_net;
    }
    return 0.0;
}

void validate(const CalibrationMaxima& maxima) {
    for (ResourceKind kind : kAllResources) {
        const double value = maxima[kind];
        if (!std::isfinite(value) || value <= 0.0) {
            throw Error(ErrorKind::Calibration,
                        "calibration maximum for " + std::string(resource_name(kind)) +
                            " must be positive");
        }
    }
}

Units ApplicationProfile::units() const {
    if (vm_accesses.empty()) {
        throw Error(ErrorKind::MalformedProfile, "profile '" + label + "' has no VM accesses");
    }
    return vm_accesses.front().units;
}

void validate(const ApplicationProfile& profile) {
    const std::string who = "profile '" + profile.label + "'";
    if (profile.vm_accesses.empty()) {
        throw Error(ErrorKind::MalformedProfile, who + " has no VM accesses");
    }
    if (profile.vm_count == 0) {
        throw Error(ErrorKind::MalformedProfile, who + " has vm_count 0");
    }
    const Units units = profile.vm_accesses.front().units;
    for (const ResourceVector& vm : profile.vm_accesses) {
        if (vm.units != units) {
            throw Error(ErrorKind::UnitMismatch, who + " mixes raw and score entries");
        }
        for (ResourceKind kind : kAllResources) {
            if (!std::isfinite(vm[kind]) || vm[kind] < 0.0) {
                throw Error(ErrorKind::MalformedProfile, who + " has a negative or non-finite " +
                                                             std::string(resource_name(kind)) +
                                                             " rate");
            }
        }
    }
    const bool aggregated_scores = units == Units::Score && profile.vm_accesses.size() == 1;
    if (!aggregated_scores && profile.vm_accesses.size() != profile.vm_count) {
        throw Error(ErrorKind::MalformedProfile,
                    who + " declares vm_count " + std::to_string(profile.vm_count) + " but lists " +
                        std::to_string(profile.vm_accesses.size()) + " VMs");
    }
    if (units == Units::Score) {
        const ResourceVector total = application_access(profile);
        for (ResourceKind kind : kAllResources) {
            if (total[kind] > 1.0 + kScoreSlack) {
                throw Error(ErrorKind::MalformedProfile,
                            who + " has a " + std::string(resource_name(kind)) +
                                " score above 1.0");
            }
        }
    }
    if (profile.isolated_runtime && !(*profile.isolated_runtime > 0.0)) {
        throw Error(ErrorKind::MalformedProfile, who + " has a nonpositive isolated runtime");
    }
}

ResourceVector application_access(const ApplicationProfile& profile) {
    if (profile.vm_accesses.empty()) {
        throw Error(ErrorKind::MalformedProfile,
                    "profile '" + profile.label + "' has no VM accesses");
    }
    ResourceVector total{0.0, 0.0, 0.0, profile.vm_accesses.front().units};
    for (const ResourceVector& vm : profile.vm_accesses) total = total + vm;
    return total;
}

double round_half_up(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // 0.15 * 10 evaluates to 1.4999999999999998; the slack lifts such ties over.
    return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

ResourceVector normalize(const ResourceVector& raw, const CalibrationMaxima& maxima,
                         ScoreRounding decimals) {
    validate(maxima);
    if (raw.units != Units::Raw) {
        throw Error(ErrorKind::UnitMismatch, "normalize expects raw rates");
    }
    if (decimals && *decimals < 0) {
        throw Error(ErrorKind::Config, "rounding decimals must be nonnegative");
    }
    ResourceVector score{0.0, 0.0, 0.0, Units::Score};
    for (ResourceKind kind : kAllResources) {
        double value = std::clamp(raw[kind] / maxima[kind], 0.0, 1.0);
        if (decimals) value = round_half_up(value, *decimals);
        score[kind] = value;
    }
    return score;
}

ApplicationProfile normalize_profile(const ApplicationProfile& profile,
                                     const CalibrationMaxima& maxima, ScoreRounding decimals) {
    validate(profile);
    ApplicationProfile scored;
    scored.label = profile.label;
    scored.vm_count = profile.vm_count;
    scored.isolated_runtime = profile.isolated_runtime;
    if (profile.units() == Units::Score) {
        scored.vm_accesses = {application_access(profile)};
    } else {
        scored.vm_accesses = {normalize(application_access(profile), maxima, decimals)};
    }
    return scored;
}

ResourceVector application_score(const ApplicationProfile& profile) {
    require_score(profile);
    return application_access(profile);
}

CoLocation::CoLocation(std::vector<ApplicationProfile> members) : members_(std::move(members)) {
    if (members_.size() < 2) {
        throw Error(ErrorKind::Domain, "a co-location needs at least two applications");
    }
    const Units units = members_.front().units();
    for (const ApplicationProfile& member : members_) {
        if (member.units() != units) {
            throw Error(ErrorKind::UnitMismatch, "co-location mixes raw and score profiles");
        }
    }
    for (const ApplicationProfile& member : members_) require_score(member);
}

std::vector<std::string> CoLocation::labels() const {
    std::vector<std::string> out;
    out.reserve(members_.size());
    for (const ApplicationProfile& member : members_) out.push_back(member.label);
    return out;
}

double accumulated_access(const CoLocation& coloc, ResourceKind resource) {
    double total = 0.0;
    for (const ApplicationProfile& member : coloc.members()) {
        total += application_score(member)[resource];
    }
    return total;
}

double slowdown(const SlowdownObservation& obs) {
    if (!(obs.isolated_runtime > 0.0) || !(obs.concurrent_runtime > 0.0)) {
        throw Error(ErrorKind::Domain, "runtimes of '" + obs.label + "' must be positive");
    }
    return obs.concurrent_runtime / obs.isolated_runtime - 1.0;
}

double interference_level(std::span<const SlowdownObservation> observations) {
    if (observations.empty()) {
        throw Error(ErrorKind::Domain, "interference level of an empty observation set");
    }
    double sum = 0.0;
    for (const SlowdownObservation& obs : observations) sum += slowdown(obs);
    return sum / static_cast<double>(observations.size());
}

double similarity_factor(const ApplicationProfile& a, const ApplicationProfile& b,
                         ResourceKind resource) {
    return 1.0 - std::abs(application_score(a)[resource] - application_score(b)[resource]);
}

double global_similarity(const CoLocation& coloc, ResourceKind resource) {
    const auto& members = coloc.members();
    if (members.size() < 2) {
        throw Error(ErrorKind::Domain, "global similarity needs at least two applications");
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            sum += similarity_factor(members[i], members[j], resource);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

}  // namespace interfere
