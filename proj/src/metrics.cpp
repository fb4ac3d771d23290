#include "wncs/metrics.hpp"

#include <numeric>

namespace wncs {

double coil(const LoopSynthesis& synth, long t_prev, const LoopSpec& loop) {
  if (t_prev < 0) {
    throw DomainError("coil: t_prev must be nonnegative");
  }
  const Mat stale = cov_propagate(synth.P_bar, t_prev + 1, loop.A, loop.W);
  return (synth.Gamma_inf * (stale - synth.P_bar)).trace();
}

double voi(const LoopSynthesis& synth, const Vec& e_check) {
  return e_check.dot(synth.Gamma_inf * e_check);
}

void aoi_update(AoiTracker& tracker, bool received) {
  if (received) {
    tracker.peaks.push_back(tracker.age);
    tracker.age = 0;
  } else {
    tracker.age += 1;
  }
  tracker.ages_trace.push_back(tracker.age);
}

AoiStats aoi_summary(const AoiTracker& tracker) {
  if (tracker.ages_trace.empty()) {
    throw EmptyTrace("aoi_summary: no slots recorded");
  }
  AoiStats stats;
  const double total = std::accumulate(tracker.ages_trace.begin(),
                                       tracker.ages_trace.end(), 0.0);
  stats.aaoi = total / static_cast<double>(tracker.ages_trace.size());
  if (!tracker.peaks.empty()) {
    const double peak_total =
        std::accumulate(tracker.peaks.begin(), tracker.peaks.end(), 0.0);
    stats.paoi = peak_total / static_cast<double>(tracker.peaks.size());
  }
  return stats;
}

Mat priority_matrix(const Vec& metric_values, const Mat& q_bar) {
  if (metric_values.size() != q_bar.rows()) {
    throw DimensionError("priority_matrix: metric length " +
                         std::to_string(metric_values.size()) +
                         " does not match q_bar rows " +
                         std::to_string(q_bar.rows()));
  }
  return metric_values.asDiagonal() * q_bar;
}

}  // namespace wncs
