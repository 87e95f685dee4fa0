#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "interfere/core.hpp"
#include "interfere/regression.hpp"
#include "interfere/stressor.hpp"

namespace interfere::dataset {

/// A plan member: its score profile and, for stressor-driven plans, the spec that produces it.
struct PlanMember {
    ApplicationProfile profile;
    std::optional<stressor::SyntheticAppSpec> synthetic;
};

enum class Scheme { PairwiseAll, ExplicitList };
enum class Aggregation { Mean, First };

[[nodiscard]] Scheme parse_scheme(std::string_view text);
[[nodiscard]] std::string_view scheme_name(Scheme scheme) noexcept;

struct CoExecutionPlan {
    std::vector<PlanMember> members;
    Scheme scheme = Scheme::PairwiseAll;
    /// Member labels of each co-location when scheme is ExplicitList.
    std::vector<std::vector<std::string>> groups;
    std::size_t repetitions = 1;
    Aggregation aggregation = Aggregation::Mean;
};

/// One co-location to execute; members are sorted by label.
struct PlanEntry {
    std::vector<PlanMember> members;
    std::size_t repetition = 0;

    [[nodiscard]] std::vector<std::string> labels() const;
    /// Labels joined with '+', e.g. "S1+S3".
    [[nodiscard]] std::string key() const;
    [[nodiscard]] CoLocation colocation() const;
};

/// Co-locations of a plan in lexicographic order of their member labels.
/// Pairwise-all over n members yields n(n+1)/2 entries, self-pairs included.
[[nodiscard]] std::vector<PlanEntry> enumerate(const CoExecutionPlan& plan);

/// Executes single instances of plan members. Implementations must be thread-safe:
/// co_execute calls run_instance for all members of an entry concurrently.
class InstanceRunner {
public:
    virtual ~InstanceRunner() = default;

    /// Isolated runtime of a member in seconds. Defaults to the profile's recorded value.
    [[nodiscard]] virtual double isolated_runtime(const PlanMember& member);

    /// Runs member `index` of `entry` once, alongside the other members, and
    /// returns its duration in seconds.
    [[nodiscard]] virtual double run_instance(const PlanEntry& entry, std::size_t index) = 0;
};

/**
 * Launches every member concurrently and restarts each one that finishes
 * while another has yet to complete its first run, so contention lasts for
 * the whole of the longest run. A member's concurrent runtime is its first
 * completion time.
 */
[[nodiscard]] std::vector<SlowdownObservation> co_execute(const PlanEntry& entry,
                                                          InstanceRunner& runner);

/// Hidden ground truth used to simulate co-executions without hardware.
struct ContentionOracle {
    double h1 = 0.7498;
    double h2 = 0.1598;
    double h3 = 0.1456;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// h1·T1 + h2·T2 + h3·T3 plus Normal(0, sigma) noise drawn from a generator
/// seeded by the oracle seed and the co-location's labels and scores.
[[nodiscard]] double oracle_slowdown(const ContentionOracle& oracle, const CoLocation& coloc);

/// Simulated runner: every member slows down by the oracle's interference level.
class OracleRunner final : public InstanceRunner {
public:
    explicit OracleRunner(ContentionOracle oracle) : oracle_(oracle) {}

    [[nodiscard]] double isolated_runtime(const PlanMember& member) override;
    [[nodiscard]] double run_instance(const PlanEntry& entry, std::size_t index) override;

private:
    ContentionOracle oracle_;
};

/// Replays externally measured runtimes keyed by co-location and member label.
class MeasurementRunner final : public InstanceRunner {
public:
    /// key() of the co-location, or "isolated", mapped to member label → seconds.
    using Table = std::map<std::string, std::map<std::string, double>>;

    explicit MeasurementRunner(Table table) : table_(std::move(table)) {}

    [[nodiscard]] double isolated_runtime(const PlanMember& member) override;
    [[nodiscard]] double run_instance(const PlanEntry& entry, std::size_t index) override;

private:
    Table table_;
};

/// Runs members' synthetic specs for real on the in-process or loopback transport,
/// one worker per VM.
class StressorRunner final : public InstanceRunner {
public:
    explicit StressorRunner(stressor::TransportKind transport) : transport_(transport) {}

    [[nodiscard]] double isolated_runtime(const PlanMember& member) override;
    [[nodiscard]] double run_instance(const PlanEntry& entry, std::size_t index) override;

private:
    double run_member(const PlanMember& member);

    stressor::TransportKind transport_;
    std::mutex mutex_;
    std::map<std::string, double> isolated_;
};

/// One row per co-location. Failed co-executions become rows with an error marker.
[[nodiscard]] InterferenceDataset build_dataset(const CoExecutionPlan& plan,
                                                InstanceRunner& runner);

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    std::size_t count = 0;
};

/// Counts rows per half-open interval [k·w, (k+1)·w) from the lowest to the highest
/// occupied bin. Rows without an observation are skipped.
[[nodiscard]] std::vector<HistogramBin> histogram(const InterferenceDataset& dataset,
                                                  double bin_width);

}  // namespace interfere::dataset
