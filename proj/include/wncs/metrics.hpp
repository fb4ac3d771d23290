#pragma once

#include <optional>
#include <vector>

#include "wncs/scenario.hpp"
#include "wncs/synthesis.hpp"

namespace wncs {

/**
 * Cost of information loss: the extra stage cost the controller carries if
 * the current packet is lost, given the last delivery was t_prev slots ago:
 *   tr(Gamma_inf [h^(t_prev+1)(P_bar) - P_bar]),
 * with h the one-step covariance prediction. Nonnegative and nondecreasing
 * in t_prev.
 */
double coil(const LoopSynthesis& synth, long t_prev, const LoopSpec& loop);

// Value of information: e_check' Gamma_inf e_check, the realized (not
// average) cost gap the accumulated innovations would close.
double voi(const LoopSynthesis& synth, const Vec& e_check);

/**
 * Discrete age-of-information sawtooth. age counts slots since the newest
 * delivered sample; a delivery in the current slot drops it to 0 after
 * recording the peak it reached.
 */
struct AoiTracker {
  long age = 0;
  std::vector<long> ages_trace;
  std::vector<long> peaks;
};

void aoi_update(AoiTracker& tracker, bool received);

struct AoiStats {
  double aaoi;                 // mean of ages_trace
  std::optional<double> paoi;  // mean of peaks; empty if nothing was received
};

// Throws EmptyTrace when no slots have been recorded.
AoiStats aoi_summary(const AoiTracker& tracker);

// m(i, j) = metric(i) * q_bar(i, j). DimensionError on size mismatch.
Mat priority_matrix(const Vec& metric_values, const Mat& q_bar);

}  // namespace wncs
