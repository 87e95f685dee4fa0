#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "interfere/core.hpp"
#include "interfere/transport.hpp"

namespace interfere::stressor {

/**
 * Parameters of one synthetic application.
 *
 * Each worker runs `omega` main iterations. An iteration performs `alpha`
 * strided SUM passes (A[i] = B[i] + C[i] over `gamma` elements with step
 * `delta`, with `theta` chained square roots per touched element) followed by
 * `beta` all-to-all exchanges of `lambda_bytes` per destination.
 */
struct SyntheticAppSpec {
    std::uint64_t omega = 0;
    std::uint64_t alpha = 0;
    std::uint64_t beta = 0;
    std::uint64_t gamma = 1;  ///< elements per vector (8-byte doubles)
    std::uint64_t delta = 1;  ///< stride in elements
    std::uint64_t theta = 0;
    std::uint64_t lambda_bytes = 0;

    friend bool operator==(const SyntheticAppSpec&, const SyntheticAppSpec&) = default;
};

/// Throws a config error when the spec violates its invariants.
void validate(const SyntheticAppSpec& spec);

/// Software-counted activity of a run, summed over workers.
struct StressorCounters {
    std::uint64_t element_accesses = 0;
    std::uint64_t sqrt_evaluations = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_received = 0;
    double computation_phase_seconds = 0.0;    ///< slowest worker
    double communication_phase_seconds = 0.0;  ///< slowest worker
    double wall_seconds = 0.0;
    std::uint64_t working_set_bytes = 0;  ///< per worker, 3·gamma·8
    std::uint64_t stride_bytes = 0;       ///< delta·8
    std::size_t workers = 0;
    double checksum = 0.0;  ///< keeps the kernels observable
};

/// Runs `spec` on `workers` threads exchanging through `transport`.
[[nodiscard]] StressorCounters run(const SyntheticAppSpec& spec, std::size_t workers,
                                   Transport& transport);

/// Decides which element accesses are charged to DRAM rather than to the SLLC.
struct AttributionOptions {
    std::uint64_t cache_bytes = 12ull << 20;  // 12 MiB shared LLC
    std::uint64_t line_bytes = 64;
};

/**
 * Converts counters into raw rates: every element access counts towards the
 * SLLC rate; accesses also count towards DRAM when the stride spans at least
 * a cache line and the working set exceeds the cache. NET is bytes sent in MB/s.
 */
[[nodiscard]] ResourceVector estimate_profile(const StressorCounters& counters,
                                              double wall_seconds,
                                              const AttributionOptions& options = {});

[[nodiscard]] const std::vector<std::pair<std::string, SyntheticAppSpec>>& preset_table();

/// Parameters of preset S1..S18. Throws unknown-label otherwise.
[[nodiscard]] SyntheticAppSpec preset(std::string_view label);

}  // namespace interfere::stressor
