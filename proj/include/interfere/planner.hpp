#pragma once

#include <string>
#include <vector>

#include "interfere/core.hpp"
#include "interfere/model.hpp"

namespace interfere {

struct ScoredGroup {
    std::vector<std::size_t> members;  ///< indices into the planner input
    std::vector<std::string> labels;   ///< sorted
    double predicted = 0.0;
};

/**
 * Output of the co-location planner, a heuristic demonstrator rather than an
 * optimal placement solver.
 *
 * `candidates` ranks every group of `slots` profiles by predicted interference
 * (ties broken by labels). `assignment` is the grouping the planner settled on.
 */
struct PlanRecommendation {
    std::string strategy;
    std::vector<ScoredGroup> candidates;
    std::vector<ScoredGroup> assignment;
    double assignment_total = 0.0;
    /// Total predicted interference of every complete assignment the planner evaluated.
    std::vector<double> evaluated_totals;
};

/**
 * Greedy planner with one step of lookahead. Each round tries every group of
 * the unassigned profiles, completes the rest by repeatedly taking the
 * cheapest remaining group, and keeps the group whose completed assignment has
 * the lowest total predicted interference.
 *
 * Throws a config error unless 2 <= slots <= profiles and slots divides the
 * number of profiles.
 */
[[nodiscard]] PlanRecommendation plan_colocations(const std::vector<ApplicationProfile>& profiles,
                                                  std::size_t slots,
                                                  const InterferenceModel& model);

}  // namespace interfere
