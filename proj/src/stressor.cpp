#include "interfere/stressor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "interfere/error.hpp"

namespace interfere::stressor {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct WorkerResult {
    std::uint64_t element_accesses = 0;
    std::uint64_t sqrt_evaluations = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_received = 0;
    double computation_seconds = 0.0;
    double communication_seconds = 0.0;
    double checksum = 0.0;
};

WorkerResult run_worker(const SyntheticAppSpec& spec, std::size_t rank, Transport& transport) {
    WorkerResult result;
    const std::size_t gamma = spec.gamma;
    std::vector<double> a(gamma, 0.0);
    std::vector<double> b(gamma, 1.0);
    std::vector<double> c(gamma, 2.0);
    double t = 2.0;

    const std::size_t workers = transport.endpoints();
    const std::size_t block = spec.lambda_bytes;
    std::vector<std::byte> send(spec.beta > 0 ? block * workers : 0,
                                static_cast<std::byte>(rank & 0xff));
    std::vector<std::byte> recv(send.size());

    for (std::uint64_t x = 0; x < spec.omega; ++x) {
        const auto compute_start = Clock::now();
        std::uint64_t touched = 0;
        std::uint64_t roots = 0;
        for (std::uint64_t y = 0; y < spec.alpha; ++y) {
            for (std::size_t i = 0; i < gamma; i += spec.delta) {
                a[i] = b[i] + c[i];
                ++touched;
                for (std::uint64_t k = 0; k < spec.theta; ++k) {
                    t = std::sqrt(t);
                    ++roots;
                }
            }
        }
        result.element_accesses += 3 * touched;  // two reads and one write per index
        result.sqrt_evaluations += roots;
        result.computation_seconds += seconds_since(compute_start);

        const auto comm_start = Clock::now();
        for (std::uint64_t z = 0; z < spec.beta; ++z) {
            try {
                const Transport::Traffic traffic = transport.all_to_all(rank, send, recv, block);
                result.bytes_sent += traffic.sent;
                result.bytes_received += traffic.received;
            } catch (const std::exception& e) {
                throw Error(ErrorKind::Communication,
                            "all-to-all failed on worker " + std::to_string(rank) +
                                " at main iteration " + std::to_string(x + 1) +
                                ", communication iteration " + std::to_string(z + 1) + ": " +
                                e.what());
            }
        }
        result.communication_seconds += seconds_since(comm_start);
    }

    double sum = t;
    for (double v : a) sum += v;
    result.checksum = sum;
    return result;
}

}  // namespace

void validate(const SyntheticAppSpec& spec) {
    if (spec.gamma < 1) throw Error(ErrorKind::Config, "gamma must be at least 1");
    if (spec.delta < 1) throw Error(ErrorKind::Config, "delta must be at least 1");
    if (spec.delta > spec.gamma) {
        throw Error(ErrorKind::Config, "delta must not exceed gamma");
    }
}

StressorCounters run(const SyntheticAppSpec& spec, std::size_t workers, Transport& transport) {
    validate(spec);
    if (workers < 1) throw Error(ErrorKind::Config, "at least one worker is required");
    if (transport.endpoints() != workers) {
        throw Error(ErrorKind::Config, "transport has " + std::to_string(transport.endpoints()) +
                                           " endpoints for " + std::to_string(workers) +
                                           " workers");
    }

    std::vector<WorkerResult> results(workers);
    std::vector<std::exception_ptr> failures(workers);
    const auto start = Clock::now();
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t rank = 0; rank < workers; ++rank) {
            threads.emplace_back([&, rank] {
                try {
                    results[rank] = run_worker(spec, rank, transport);
                } catch (...) {
                    failures[rank] = std::current_exception();
                    transport.abandon(rank);
                }
            });
        }
    }
    const double wall = seconds_since(start);

    // Report the root cause rather than a peer's "aborted" follow-on failure.
    std::exception_ptr first;
    for (const std::exception_ptr& failure : failures) {
        if (!failure) continue;
        if (!first) first = failure;
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            if (std::string_view(e.what()).find("aborted by a failed peer") == std::string_view::npos) {
                first = failure;
                break;
            }
        }
    }
    if (first) std::rethrow_exception(first);

    StressorCounters counters;
    counters.workers = workers;
    counters.wall_seconds = wall;
    counters.working_set_bytes = 3 * spec.gamma * sizeof(double);
    counters.stride_bytes = spec.delta * sizeof(double);
    for (const WorkerResult& r : results) {
        counters.element_accesses += r.element_accesses;
        counters.sqrt_evaluations += r.sqrt_evaluations;
        counters.bytes_sent += r.bytes_sent;
        counters.bytes_received += r.bytes_received;
        counters.computation_phase_seconds =
            std::max(counters.computation_phase_seconds, r.computation_seconds);
        counters.communication_phase_seconds =
            std::max(counters.communication_phase_seconds, r.communication_seconds);
        counters.checksum += r.checksum;
    }
    return counters;
}

ResourceVector estimate_profile(const StressorCounters& counters, double wall_seconds,
                                const AttributionOptions& options) {
    if (!(wall_seconds > 0.0) || !std::isfinite(wall_seconds)) {
        throw Error(ErrorKind::Domain, "profile estimation needs a positive duration");
    }
    const bool misses = counters.stride_bytes >= options.line_bytes &&
                        counters.working_set_bytes > options.cache_bytes;
    const double accesses = static_cast<double>(counters.element_accesses);
    ResourceVector rates{0.0, 0.0, 0.0, Units::Raw};
    rates.sllc = accesses / wall_seconds / 1e6;
    rates.dram = misses ? rates.sllc : 0.0;
    rates.net = static_cast<double>(counters.bytes_sent) / wall_seconds / 1e6;
    return rates;
}

const std::vector<std::pair<std::string, SyntheticAppSpec>>& preset_table() {
    // omega, alpha, beta, gamma, delta, theta, lambda
    static const std::vector<std::pair<std::string, SyntheticAppSpec>> table{
        {"S1", {25, 120000, 5200, 7000, 512, 0, 22600}},
        {"S2", {25, 90000, 5200, 9000, 1024, 6, 22600}},
        {"S3", {25, 40000, 5200, 11500, 2048, 22, 22600}},
        {"S4", {25, 7500, 5200, 30000, 512, 0, 22600}},
        {"S5", {25, 2700, 5200, 39000, 512, 21, 22600}},
        {"S6", {25, 20000, 5200, 11800, 256, 2, 22600}},
        {"S7", {25, 120000, 1500, 7000, 512, 0, 749568}},
        {"S8", {25, 90000, 1500, 9000, 1024, 6, 749568}},
        {"S9", {25, 40000, 1500, 11500, 2048, 22, 749568}},
        {"S10", {25, 7500, 1500, 30000, 512, 0, 749568}},
        {"S11", {25, 2700, 1500, 39000, 512, 21, 749568}},
        {"S12", {25, 20000, 1500, 11800, 256, 2, 749568}},
        // beta jumps to 150000 for S13-S18; reproduced as published.
        {"S13", {25, 120000, 150000, 7000, 512, 0, 150000}},
        {"S14", {25, 90000, 150000, 9000, 1024, 6, 150000}},
        {"S15", {25, 40000, 150000, 11500, 2048, 22, 150000}},
        {"S16", {25, 7500, 150000, 30000, 512, 0, 150000}},
        {"S17", {25, 2700, 150000, 39000, 512, 21, 150000}},
        {"S18", {25, 20000, 150000, 11800, 256, 2, 150000}},
    };
    return table;
}

SyntheticAppSpec preset(std::string_view label) {
    for (const auto& [name, spec] : preset_table()) {
        if (name == label) return spec;
    }
    throw Error(ErrorKind::UnknownLabel, "unknown preset '" + std::string(label) + "'");
}

}  // namespace interfere::stressor
