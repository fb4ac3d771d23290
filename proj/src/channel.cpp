#include "wncs/channel.hpp"

namespace wncs {

ChannelOutcome realize(const ScheduleDecision& decision, const Mat& q_bar,
                       Rng& rng) {
  const Eigen::Index n =
      static_cast<Eigen::Index>(decision.channel_of_loop.size());
  if (q_bar.rows() != n || q_bar.cols() != decision.num_channels) {
    throw DimensionError("realize: q_bar shape does not match decision");
  }
  ChannelOutcome outcome;
  outcome.gamma = Eigen::MatrixXi::Zero(n, decision.num_channels);
  outcome.delivered.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = decision.channel_of_loop[static_cast<std::size_t>(i)];
    if (j < 0) continue;
    if (rng.bernoulli(q_bar(i, j))) {
      outcome.gamma(i, j) = 1;
      outcome.delivered[static_cast<std::size_t>(i)] = true;
    }
  }
  return outcome;
}

}  // namespace wncs
