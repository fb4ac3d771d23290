#pragma once

#include <optional>

#include "wncs/mat_util.hpp"
#include "wncs/scenario.hpp"

namespace wncs {

struct RiccatiOptions {
  double tol = 1e-10;
  long max_iter = 1000000;
};

struct ControlSolution {
  Mat Pi;  // stationary cost-to-go
  Mat L;   // feedback gain, u = L x
};

struct FilterSolution {
  Mat P_bar;  // stationary posterior covariance
  Mat K;      // stationary filter gain
};

// Everything the runtime needs about one loop, computed once up front.
struct LoopSynthesis {
  Mat Pi_inf;
  Mat L_inf;
  Mat Gamma_inf;
  Mat P_bar;
  Mat K_gain;
};

// One-step prediction of an error covariance: A X A' + W.
Mat cov_predict(const Mat& x, const Mat& A, const Mat& W);

// Measurement update of a covariance: X - X C' (C X C' + V)^-1 C X.
Mat cov_update(const Mat& x, const Mat& C, const Mat& V);

// t-fold cov_predict starting from p_bar; t = 0 returns p_bar.
Mat cov_propagate(const Mat& p_bar, long t, const Mat& A, const Mat& W);

/**
 * Fixed-point iteration for the discrete-time control Riccati equation
 *   Pi = A'Pi A + Q - A'Pi B (B'Pi B + R)^-1 B'Pi A,
 * started from `init` (Q when unset). Returns Pi and the gain
 * L = -(B'Pi B + R)^-1 B'Pi A. Throws NoConvergence past max_iter or when
 * the iterates blow up (non-stabilizable/undetectable data), and
 * NumericalError when B'Pi B + R is singular or badly conditioned.
 */
ControlSolution solve_control_dare(const Mat& A, const Mat& B, const Mat& Q,
                                   const Mat& R,
                                   const RiccatiOptions& opts = {},
                                   std::optional<Mat> init = std::nullopt);

/**
 * Fixed point of the posterior covariance map P -> cov_update(cov_predict(P)),
 * iterated from the identity. Returns P_bar and the stationary gain
 * K = h(P_bar) C' (C h(P_bar) C' + V)^-1 where h is cov_predict.
 */
FilterSolution solve_filter_riccati(const Mat& A, const Mat& C, const Mat& W,
                                    const Mat& V,
                                    const RiccatiOptions& opts = {});

// Gamma_inf = L'(B'Pi B + R)L: per-slot cost weight of estimation error.
Mat gamma_infinity(const Mat& Pi, const Mat& L, const Mat& B, const Mat& R);

// Solves both Riccati equations for one loop and bundles the results.
LoopSynthesis synthesize_loop(const LoopSpec& loop,
                              const RiccatiOptions& opts = {});

}  // namespace wncs
