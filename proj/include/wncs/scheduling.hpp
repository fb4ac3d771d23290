#pragma once

#include <vector>

#include "wncs/mat_util.hpp"
#include "wncs/rng.hpp"
#include "wncs/scenario.hpp"

namespace wncs {

/**
 * One slot's channel-access decision. channel_of_loop[i] is the channel
 * assigned to loop i, or -1. delta() expands it to the 0/1 matrix form
 * (loops x channels) when that is more convenient.
 */
struct ScheduleDecision {
  std::vector<int> channel_of_loop;
  int num_channels = 0;

  Eigen::MatrixXi delta() const;
};

// Row and column sums of a 0/1 decision matrix are all <= 1.
bool is_feasible(const Eigen::MatrixXi& delta);

/**
 * Maximum-weight bipartite matching of loops to channels. Weights must be
 * finite; nonnegative weights mean a matching of size min(N, M) is always
 * produced (a free transmission is never declined). Ties in total weight are
 * resolved toward the lexicographically smallest assignment: scanning cells
 * (loop, channel) in row-major order, the tied matching that schedules the
 * earliest cells wins.
 */
ScheduleDecision assign_max_weight(const Mat& weights);

/**
 * Exhaustive reference for assign_max_weight, same tie rule, used to
 * cross-check the matching solver. Throws TooLarge beyond 4x4.
 */
ScheduleDecision brute_force_schedule(const Mat& weights);

// round_robin / random / always. k is the slot index; rng is consumed only
// by the random policy. Throws InfeasibleAlways when always has more loops
// than channels, DomainError for a non-baseline policy.
ScheduleDecision assign_baseline(Policy policy, long k, int num_loops,
                                 int num_channels, Rng& rng);

// Total weight of a decision, summed in row-major cell order so reference
// and solver aggregate identically.
double decision_value(const ScheduleDecision& decision, const Mat& weights);

}  // namespace wncs
