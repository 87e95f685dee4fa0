#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace interfere {

/// Shared resources whose contention drives interference.
enum class ResourceKind { Sllc = 0, Dram = 1, Net = 2 };

inline constexpr std::array<ResourceKind, 3> kAllResources{ResourceKind::Sllc, ResourceKind::Dram,
                                                           ResourceKind::Net};

[[nodiscard]] std::string_view resource_name(ResourceKind kind) noexcept;

/// Raw rates are MR/s (SLLC, DRAM) and MB/s (NET); scores are dimensionless.
enum class Units { Raw, Score };

[[nodiscard]] std::string_view units_name(Units units) noexcept;
[[nodiscard]] Units parse_units(std::string_view text);

struct ResourceVector {
    double sllc = 0.0;
    double dram = 0.0;
    double net = 0.0;
    Units units = Units::Raw;

    [[nodiscard]] double operator[](ResourceKind kind) const noexcept;
    [[nodiscard]] double& operator[](ResourceKind kind) noexcept;

    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;
};

/// Component-wise sum. Throws a unit-mismatch error when the tags differ.
[[nodiscard]] ResourceVector operator+(const ResourceVector& lhs, const ResourceVector& rhs);

/// Highest access rates observed on the calibration machine; a score of 1.0 maps here.
struct CalibrationMaxima {
    double max_sllc = 0.0;
    double max_dram = 0.0;
    double max_net = 0.0;

    [[nodiscard]] double operator[](ResourceKind kind) const noexcept;
};

/// Throws a calibration error unless every maximum is finite and strictly positive.
void validate(const CalibrationMaxima& maxima);

/**
 * An application's per-VM access rates.
 *
 * Raw profiles carry one entry per VM. Score profiles may instead carry a
 * single whole-application entry (what normalize_profile produces), in which
 * case vm_count still records the VM count the scores were measured with.
 */
struct ApplicationProfile {
    std::string label;
    std::vector<ResourceVector> vm_accesses;
    std::size_t vm_count = 0;
    std::optional<double> isolated_runtime;

    [[nodiscard]] Units units() const;
};

/// Throws a malformed-profile error when the profile violates its invariants.
void validate(const ApplicationProfile& profile);

/// Decimal places used when rounding scores; std::nullopt means no rounding.
using ScoreRounding = std::optional<int>;

/// Sum of the per-VM access vectors.
[[nodiscard]] ResourceVector application_access(const ApplicationProfile& profile);

/// Rounds half-up to `decimals` places, tolerating binary representation error at the tie.
[[nodiscard]] double round_half_up(double value, int decimals);

/**
 * Converts raw rates into scores: each component is divided by its calibration
 * maximum, clamped to [0, 1] and optionally rounded half-up.
 */
[[nodiscard]] ResourceVector normalize(const ResourceVector& raw, const CalibrationMaxima& maxima,
                                       ScoreRounding decimals);

/// Returns a score profile holding one whole-application entry.
[[nodiscard]] ApplicationProfile normalize_profile(const ApplicationProfile& profile,
                                                   const CalibrationMaxima& maxima,
                                                   ScoreRounding decimals);

/// Whole-application score of a score-unit profile. Throws unit-mismatch on raw input.
[[nodiscard]] ResourceVector application_score(const ApplicationProfile& profile);

/// Applications sharing one host. All members must be score profiles.
class CoLocation {
public:
    explicit CoLocation(std::vector<ApplicationProfile> members);

    [[nodiscard]] const std::vector<ApplicationProfile>& members() const noexcept { return members_; }
    [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
    [[nodiscard]] std::vector<std::string> labels() const;

private:
    std::vector<ApplicationProfile> members_;
};

/// Sum over the co-located applications of their score for `resource`.
[[nodiscard]] double accumulated_access(const CoLocation& coloc, ResourceKind resource);

struct SlowdownObservation {
    std::string label;
    double isolated_runtime = 0.0;
    double concurrent_runtime = 0.0;
};

/// Fractional runtime increase, C/T - 1. Not clamped.
[[nodiscard]] double slowdown(const SlowdownObservation& obs);

/// Mean slowdown over all observations.
[[nodiscard]] double interference_level(std::span<const SlowdownObservation> observations);

/// 1 - |A_a - A_b| for one resource.
[[nodiscard]] double similarity_factor(const ApplicationProfile& a, const ApplicationProfile& b,
                                       ResourceKind resource);

/// Mean similarity factor over every unordered pair of members, per resource.
[[nodiscard]] double global_similarity(const CoLocation& coloc, ResourceKind resource);

}  // namespace interfere
