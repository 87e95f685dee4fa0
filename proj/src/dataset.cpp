#include "interfere/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <random>
#include <set>
#include <thread>

#include "interfere/error.hpp"
#include "interfere/model.hpp"

namespace interfere::dataset {

namespace {

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::vector<PlanMember> sorted_by_label(std::vector<PlanMember> members) {
    std::stable_sort(members.begin(), members.end(), [](const PlanMember& a, const PlanMember& b) {
        return a.profile.label < b.profile.label;
    });
    return members;
}

}  // namespace

Scheme parse_scheme(std::string_view text) {
    if (text == "pairwise-all") return Scheme::PairwiseAll;
    if (text == "explicit-list") return Scheme::ExplicitList;
    throw Error(ErrorKind::Config, "unknown plan scheme '" + std::string(text) + "'");
}

std::string_view scheme_name(Scheme scheme) noexcept {
    return scheme == Scheme::PairwiseAll ? "pairwise-all" : "explicit-list";
}

std::vector<std::string> PlanEntry::labels() const {
    std::vector<std::string> out;
    out.reserve(members.size());
    for (const PlanMember& member : members) out.push_back(member.profile.label);
    return out;
}

std::string PlanEntry::key() const {
    std::string out;
    for (const PlanMember& member : members) {
        if (!out.empty()) out += '+';
        out += member.profile.label;
    }
    return out;
}

CoLocation PlanEntry::colocation() const {
    std::vector<ApplicationProfile> profiles;
    profiles.reserve(members.size());
    for (const PlanMember& member : members) profiles.push_back(member.profile);
    return CoLocation(std::move(profiles));
}

std::vector<PlanEntry> enumerate(const CoExecutionPlan& plan) {
    if (plan.members.empty()) {
        throw Error(ErrorKind::EmptyPlan, "the plan has no members");
    }
    if (plan.repetitions < 1) {
        throw Error(ErrorKind::Config, "repetitions must be at least 1");
    }
    const std::vector<PlanMember> members = sorted_by_label(plan.members);
    std::vector<PlanEntry> entries;

    if (plan.scheme == Scheme::PairwiseAll) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i; j < members.size(); ++j) {
                entries.push_back(PlanEntry{{members[i], members[j]}, 0});
            }
        }
    } else {
        if (plan.groups.empty()) {
            throw Error(ErrorKind::EmptyPlan, "explicit-list plan lists no co-locations");
        }
        for (const std::vector<std::string>& group : plan.groups) {
            if (group.size() < 2) {
                throw Error(ErrorKind::Config, "a co-location needs at least two members");
            }
            PlanEntry entry;
            for (const std::string& label : group) {
                const auto it = std::find_if(members.begin(), members.end(), [&](const PlanMember& m) {
                    return m.profile.label == label;
                });
                if (it == members.end()) {
                    throw Error(ErrorKind::UnknownLabel, "plan group names unknown member '" + label + "'");
                }
                entry.members.push_back(*it);
            }
            entry.members = sorted_by_label(std::move(entry.members));
            entries.push_back(std::move(entry));
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const PlanEntry& a, const PlanEntry& b) {
        return a.labels() < b.labels();
    });
    return entries;
}

double InstanceRunner::isolated_runtime(const PlanMember& member) {
    if (!member.profile.isolated_runtime) {
        throw Error(ErrorKind::CoExecution,
                    "member '" + member.profile.label + "' has no measured isolated runtime");
    }
    return *member.profile.isolated_runtime;
}

std::vector<SlowdownObservation> co_execute(const PlanEntry& entry, InstanceRunner& runner) {
    if (entry.members.size() < 2) {
        throw Error(ErrorKind::Config, "a co-execution needs at least two members");
    }
    PlanEntry sorted{sorted_by_label(entry.members), entry.repetition};
    const std::size_t n = sorted.members.size();

    std::vector<double> isolated(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            isolated[i] = runner.isolated_runtime(sorted.members[i]);
        } catch (const std::exception& e) {
            throw Error(ErrorKind::CoExecution,
                        "member '" + sorted.members[i].profile.label + "': " + e.what());
        }
    }

    std::vector<double> first_completion(n, 0.0);
    std::atomic<std::size_t> pending{n};
    std::atomic<bool> failed{false};
    std::vector<std::exception_ptr> failures(n);
    {
        std::vector<std::jthread> threads;
        threads.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            threads.emplace_back([&, i] {
                bool first = true;
                // Restart until every member has completed at least once.
                while (first || (pending.load() > 0 && !failed.load())) {
                    double duration = 0.0;
                    try {
                        duration = runner.run_instance(sorted, i);
                    } catch (...) {
                        failures[i] = std::current_exception();
                        failed.store(true);
                        if (first) pending.fetch_sub(1);
                        return;
                    }
                    if (first) {
                        first_completion[i] = duration;
                        first = false;
                        pending.fetch_sub(1);
                    }
                }
            });
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i]) continue;
        try {
            std::rethrow_exception(failures[i]);
        } catch (const std::exception& e) {
            throw Error(ErrorKind::CoExecution,
                        "member '" + sorted.members[i].profile.label + "' failed: " + e.what());
        }
    }

    std::vector<SlowdownObservation> observations;
    observations.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        observations.push_back({sorted.members[i].profile.label, isolated[i], first_completion[i]});
    }
    return observations;
}

double oracle_slowdown(const ContentionOracle& oracle, const CoLocation& coloc) {
    const FeatureRow row = features(coloc);
    const InterferenceModel hidden{oracle.h1, oracle.h2, oracle.h3, Provenance::Fitted, std::nullopt};
    const double clean = predict(hidden, row);
    if (oracle.sigma == 0.0) return clean;

    std::vector<std::pair<std::string, ResourceVector>> members;
    for (const ApplicationProfile& member : coloc.members()) {
        members.emplace_back(member.label, application_score(member));
    }
    std::sort(members.begin(), members.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const auto& [label, score] : members) {
        hash = fnv1a(hash, label.data(), label.size());
        for (ResourceKind kind : kAllResources) {
            const auto bits = std::bit_cast<std::uint64_t>(score[kind]);
            hash = fnv1a(hash, &bits, sizeof(bits));
        }
    }
    std::seed_seq seq{static_cast<std::uint32_t>(oracle.seed),
                      static_cast<std::uint32_t>(oracle.seed >> 32),
                      static_cast<std::uint32_t>(hash), static_cast<std::uint32_t>(hash >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, oracle.sigma);
    return clean + noise(rng);
}

double OracleRunner::isolated_runtime(const PlanMember& member) {
    return member.profile.isolated_runtime.value_or(1.0);
}

double OracleRunner::run_instance(const PlanEntry& entry, std::size_t index) {
    ContentionOracle oracle = oracle_;
    oracle.seed += entry.repetition * 0x9e3779b97f4a7c15ull;
    const double level = oracle_slowdown(oracle, entry.colocation());
    return isolated_runtime(entry.members.at(index)) * (1.0 + level);
}

double MeasurementRunner::isolated_runtime(const PlanMember& member) {
    const auto table = table_.find("isolated");
    if (table != table_.end()) {
        const auto it = table->second.find(member.profile.label);
        if (it != table->second.end()) return it->second;
    }
    return InstanceRunner::isolated_runtime(member);
}

double MeasurementRunner::run_instance(const PlanEntry& entry, std::size_t index) {
    const std::string key = entry.key();
    const std::string& label = entry.members.at(index).profile.label;
    const auto table = table_.find(key);
    if (table == table_.end()) {
        throw Error(ErrorKind::CoExecution, "no measurements for co-location " + key);
    }
    const auto it = table->second.find(label);
    if (it == table->second.end()) {
        throw Error(ErrorKind::CoExecution, "no measurement of '" + label + "' in " + key);
    }
    return it->second;
}

double StressorRunner::run_member(const PlanMember& member) {
    if (!member.synthetic) {
        throw Error(ErrorKind::Config,
                    "member '" + member.profile.label + "' has no synthetic spec to run");
    }
    const std::size_t workers = std::max<std::size_t>(1, member.profile.vm_count);
    auto transport = stressor::make_transport(transport_, workers);
    return stressor::run(*member.synthetic, workers, *transport).wall_seconds;
}

double StressorRunner::isolated_runtime(const PlanMember& member) {
    if (member.profile.isolated_runtime) return *member.profile.isolated_runtime;
    {
        std::lock_guard lock(mutex_);
        const auto it = isolated_.find(member.profile.label);
        if (it != isolated_.end()) return it->second;
    }
    const double seconds = run_member(member);
    std::lock_guard lock(mutex_);
    return isolated_.emplace(member.profile.label, seconds).first->second;
}

double StressorRunner::run_instance(const PlanEntry& entry, std::size_t index) {
    return run_member(entry.members.at(index));
}

InterferenceDataset build_dataset(const CoExecutionPlan& plan, InstanceRunner& runner) {
    InterferenceDataset dataset;
    for (const PlanEntry& entry : enumerate(plan)) {
        DatasetRow row;
        row.features = features(entry.colocation());
        try {
            double total = 0.0;
            std::size_t runs = 0;
            for (std::size_t r = 0; r < plan.repetitions; ++r) {
                PlanEntry repeat = entry;
                repeat.repetition = r;
                const double level = interference_level(co_execute(repeat, runner));
                total += level;
                ++runs;
                if (plan.aggregation == Aggregation::First) break;
            }
            row.observed = total / static_cast<double>(runs);
        } catch (const Error& e) {
            row.observed = std::nan("");
            row.error = std::string(error_kind_name(e.kind())) + ": " + e.what();
        }
        dataset.rows.push_back(std::move(row));
    }
    return dataset;
}

std::vector<HistogramBin> histogram(const InterferenceDataset& dataset, double bin_width) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
        throw Error(ErrorKind::Domain, "histogram bin width must be positive");
    }
    std::map<long long, std::size_t> counts;
    for (const DatasetRow& row : dataset.rows) {
        if (!row.ok() || !std::isfinite(row.observed)) continue;
        ++counts[static_cast<long long>(std::floor(row.observed / bin_width))];
    }
    std::vector<HistogramBin> bins;
    if (counts.empty()) return bins;
    const long long lo = counts.begin()->first;
    const long long hi = counts.rbegin()->first;
    for (long long k = lo; k <= hi; ++k) {
        const auto it = counts.find(k);
        bins.push_back({static_cast<double>(k) * bin_width, static_cast<double>(k + 1) * bin_width,
                        it == counts.end() ? 0 : it->second});
    }
    return bins;
}

}  // namespace interfere::dataset
