#include "interfere/planner.hpp"

#include <algorithm>
#include <map>

#include "interfere/error.hpp"

namespace interfere {

namespace {

constexpr std::size_t kMaxCandidateGroups = 5000;

using Group = std::vector<std::size_t>;

void combinations(const std::vector<std::size_t>& pool, std::size_t k, std::size_t start,
                  Group& current, std::vector<Group>& out) {
    if (current.size() == k) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = start; i + (k - current.size()) <= pool.size(); ++i) {
        current.push_back(pool[i]);
        combinations(pool, k, i + 1, current, out);
        current.pop_back();
    }
}

std::vector<Group> combinations(const std::vector<std::size_t>& pool, std::size_t k) {
    std::vector<Group> out;
    Group current;
    combinations(pool, k, 0, current, out);
    return out;
}

class GroupScorer {
public:
    GroupScorer(const std::vector<ApplicationProfile>& profiles, const InterferenceModel& model)
        : profiles_(profiles), model_(model) {}

    const ScoredGroup& score(const Group& group) {
        auto it = cache_.find(group);
        if (it != cache_.end()) return it->second;
        ScoredGroup scored;
        scored.members = group;
        std::vector<ApplicationProfile> members;
        for (std::size_t index : group) {
            members.push_back(profiles_[index]);
            scored.labels.push_back(profiles_[index].label);
        }
        std::sort(scored.labels.begin(), scored.labels.end());
        scored.predicted = predict(model_, features(CoLocation(std::move(members))));
        return cache_.emplace(group, std::move(scored)).first->second;
    }

private:
    const std::vector<ApplicationProfile>& profiles_;
    const InterferenceModel& model_;
    std::map<Group, ScoredGroup> cache_;
};

bool ranks_before(const ScoredGroup& a, const ScoredGroup& b) {
    if (a.predicted != b.predicted) return a.predicted < b.predicted;
    if (a.labels != b.labels) return a.labels < b.labels;
    return a.members < b.members;
}

std::vector<std::size_t> without(const std::vector<std::size_t>& pool, const Group& group) {
    std::vector<std::size_t> rest;
    for (std::size_t index : pool) {
        if (std::find(group.begin(), group.end(), index) == group.end()) rest.push_back(index);
    }
    return rest;
}

// Completes an assignment by repeatedly taking the cheapest remaining group.
double myopic_completion(std::vector<std::size_t> pool, std::size_t slots, GroupScorer& scorer) {
    double total = 0.0;
    while (!pool.empty()) {
        const ScoredGroup* best = nullptr;
        for (const Group& group : combinations(pool, slots)) {
            const ScoredGroup& scored = scorer.score(group);
            if (best == nullptr || ranks_before(scored, *best)) best = &scored;
        }
        total += best->predicted;
        pool = without(pool, best->members);
    }
    return total;
}

std::size_t binomial(std::size_t n, std::size_t k) {
    std::size_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        if (result > kMaxCandidateGroups) return result;
    }
    return result;
}

}  // namespace

PlanRecommendation plan_colocations(const std::vector<ApplicationProfile>& profiles,
                                    std::size_t slots, const InterferenceModel& model) {
    const std::size_t n = profiles.size();
    if (slots < 2) throw Error(ErrorKind::Config, "slots per host must be at least 2");
    if (n < slots) {
        throw Error(ErrorKind::Config, "need at least " + std::to_string(slots) +
                                           " profiles to fill a host, got " + std::to_string(n));
    }
    if (n % slots != 0) {
        throw Error(ErrorKind::Config, std::to_string(n) + " profiles cannot fill hosts of " +
                                           std::to_string(slots) + " slots exactly");
    }
    if (binomial(n, slots) > kMaxCandidateGroups) {
        throw Error(ErrorKind::Config, "too many candidate groupings to evaluate");
    }

    GroupScorer scorer(profiles, model);
    PlanRecommendation plan;
    plan.strategy = "greedy-lookahead-1";

    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;

    for (const Group& group : combinations(pool, slots)) plan.candidates.push_back(scorer.score(group));
    std::sort(plan.candidates.begin(), plan.candidates.end(), ranks_before);

    while (!pool.empty()) {
        const ScoredGroup* best = nullptr;
        double best_total = 0.0;
        for (const Group& group : combinations(pool, slots)) {
            const ScoredGroup& scored = scorer.score(group);
            const double total =
                plan.assignment_total + scored.predicted +
                myopic_completion(without(pool, group), slots, scorer);
            plan.evaluated_totals.push_back(total);
            if (best == nullptr || total < best_total ||
                (total == best_total && ranks_before(scored, *best))) {
                best = &scored;
                best_total = total;
            }
        }
        plan.assignment.push_back(*best);
        plan.assignment_total += best->predicted;
        pool = without(pool, best->members);
    }
    return plan;
}

}  // namespace interfere
