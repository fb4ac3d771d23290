#include "wncs/synthesis.hpp"

namespace wncs {
namespace {

// Max-norm comparison: Frobenius norms of exploding iterates overflow to
// inf and would compare inf <= inf, mistaking divergence for convergence.
bool close_enough(const Mat& next, const Mat& prev, double tol) {
  if (!next.allFinite()) return false;
  const double diff = (next - prev).cwiseAbs().maxCoeff();
  return diff <= tol * (1.0 + next.cwiseAbs().maxCoeff());
}

}  // namespace

Mat cov_predict(const Mat& x, const Mat& A, const Mat& W) {
  return symmetrize(A * x * A.transpose() + W);
}

Mat cov_update(const Mat& x, const Mat& C, const Mat& V) {
  const Mat cx = C * x;                          // p x n
  const Mat s = symmetrize(cx * C.transpose() + V);
  const Mat gain_t = solve_spd(s, cx, "cov_update");  // (C X C' + V)^-1 C X
  return symmetrize(x - cx.transpose() * gain_t);
}

Mat cov_propagate(const Mat& p_bar, long t, const Mat& A, const Mat& W) {
  Mat p = p_bar;
  for (long i = 0; i < t; ++i) p = cov_predict(p, A, W);
  return p;
}

ControlSolution solve_control_dare(const Mat& A, const Mat& B, const Mat& Q,
                                   const Mat& R, const RiccatiOptions& opts,
                                   std::optional<Mat> init) {
  Mat pi = init ? symmetrize(*init) : symmetrize(Q);
  for (long iter = 0; iter < opts.max_iter; ++iter) {
    const Mat s = symmetrize(B.transpose() * pi * B + R);
    const Mat pia = B.transpose() * pi * A;             // m x n
    const Mat gain = solve_spd(s, pia, "solve_control_dare");  // S^-1 B'Pi A
    const Mat next =
        symmetrize(A.transpose() * pi * A + Q - pia.transpose() * gain);
    if (!next.allFinite()) {
      throw NoConvergence(
          "solve_control_dare: iterates diverged (non-stabilizable data?)");
    }
    if (close_enough(next, pi, opts.tol)) {
      const Mat s_final =
          symmetrize(B.transpose() * next * B + R);
      const Mat l = -solve_spd(s_final, B.transpose() * next * A,
                               "solve_control_dare");
      return {next, l};
    }
    pi = next;
  }
  throw NoConvergence("solve_control_dare: no fixed point within max_iter");
}

FilterSolution solve_filter_riccati(const Mat& A, const Mat& C, const Mat& W,
                                    const Mat& V, const RiccatiOptions& opts) {
  Mat p = Mat::Identity(A.rows(), A.cols());
  for (long iter = 0; iter < opts.max_iter; ++iter) {
    const Mat prior = cov_predict(p, A, W);
    if (!prior.allFinite()) {
      throw NoConvergence(
          "solve_filter_riccati: iterates diverged (undetectable data?)");
    }
    const Mat next = cov_update(prior, C, V);
    if (close_enough(next, p, opts.tol)) {
      const Mat prior = cov_predict(next, A, W);
      const Mat s = symmetrize(C * prior * C.transpose() + V);
      // K = prior C' S^-1, assembled as (S^-1 C prior)'.
      const Mat k_t = solve_spd(s, C * prior, "solve_filter_riccati");
      return {next, k_t.transpose()};
    }
    p = next;
  }
  throw NoConvergence("solve_filter_riccati: no fixed point within max_iter");
}

Mat gamma_infinity(const Mat& Pi, const Mat& L, const Mat& B, const Mat& R) {
  const Mat s = symmetrize(B.transpose() * Pi * B + R);
  return symmetrize(L.transpose() * s * L);
}

LoopSynthesis synthesize_loop(const LoopSpec& loop, const RiccatiOptions& opts) {
  LoopSynthesis out;
  const ControlSolution ctrl =
      solve_control_dare(loop.A, loop.B, loop.Q, loop.R, opts);
  out.Pi_inf = ctrl.Pi;
  out.L_inf = ctrl.L;
  out.Gamma_inf = gamma_infinity(ctrl.Pi, ctrl.L, loop.B, loop.R);
  const FilterSolution filt =
      solve_filter_riccati(loop.A, loop.C, loop.W, loop.V, opts);
  out.P_bar = filt.P_bar;
  out.K_gain = filt.K;
  return out;
}

}  // namespace wncs
