#pragma once

#include "wncs/rng.hpp"
#include "wncs/scheduling.hpp"

namespace wncs {

struct ChannelOutcome {
  Eigen::MatrixXi gamma;           // per-link success indicators
  std::vector<bool> delivered;     // per-loop: any link of that row succeeded
};

/**
 * Memoryless Bernoulli links: a scheduled (loop, channel) pair succeeds
 * with probability q_bar(loop, channel), independently of everything else.
 * Draws are consumed in row-major (loop, channel) order over scheduled
 * links only, so the stream position is a pure function of the decision.
 */
ChannelOutcome realize(const ScheduleDecision& decision, const Mat& q_bar,
                       Rng& rng);

}  // namespace wncs
