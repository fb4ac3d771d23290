#pragma once

#include <vector>

#include "wncs/mat_util.hpp"
#include "wncs/rng.hpp"

namespace wncs::info {

// Normalization slack accepted when validating probability tables.
inline constexpr double kMassTol = 1e-12;

// Throws InvalidDistribution unless p is entrywise >= 0 and sums to 1.
void check_distribution(const Vec& p);
void check_joint(const Mat& joint);

// Shannon entropy in bits, 0 log 0 = 0.
double entropy(const Vec& p);

// I(X;Y) in bits from a joint table p(x, y).
double mutual_information(const Mat& joint);

/**
 * Three-variable joint p(x, y, z), stored as one x-by-y slice per z value.
 * Validated on construction.
 */
class Joint3 {
 public:
  explicit Joint3(std::vector<Mat> slices);

  Eigen::Index nx() const { return slices_.front().rows(); }
  Eigen::Index ny() const { return slices_.front().cols(); }
  Eigen::Index nz() const { return static_cast<Eigen::Index>(slices_.size()); }
  const Mat& slice(Eigen::Index z) const {
    return slices_[static_cast<std::size_t>(z)];
  }

 private:
  std::vector<Mat> slices_;
};

// I(X;Y|Z) in bits.
double conditional_mi(const Joint3& joint);

// Rate-distortion function of a scalar Gaussian source under squared error:
// max(0, 0.5 log2(variance / distortion)). DomainError unless both positive.
double gaussian_rd(double variance, double distortion);

struct RdPoint {
  double rate;        // bits
  double distortion;  // expected d under the returned encoder
  Mat encoder;        // rows x, cols xhat, rows sum to 1
};

/**
 * Blahut-Arimoto point on the rate-distortion curve of source p_x with
 * distortion table d, at Lagrange parameter beta >= 0 (slope -beta in nats).
 * beta = 0 returns the zero-rate endpoint: the best single reproduction
 * letter. Utilities are handled by negating them into d. Throws
 * NoConvergence past max_iter.
 */
RdPoint blahut_arimoto(const Vec& p_x, const Mat& d, double beta,
                       double tol = 1e-10, long max_iter = 100000);

struct IbResult {
  Mat encoder;  // p(t|x), rows x
  double i_xt;  // bits
  double i_ty;  // bits
  double objective;  // I(X;T) - beta * I(T;Y), bits
};

/**
 * Information bottleneck by self-consistent iteration on p(t|x), p(t),
 * p(y|t). Each restart starts from a random encoder drawn from rng; the
 * converged restart with the smallest objective wins. Throws NoConvergence
 * when no restart converges.
 */
IbResult ib_solve(const Mat& joint_xy, int t_size, double beta, Rng& rng,
                  double tol = 1e-10, long max_iter = 10000, int restarts = 10);

/**
 * Truth-valuation table for semantic measures: table(x, y) in [0, 1] grades
 * how true message y is of world state x; prior is the world distribution
 * used to form the truth marginal.
 */
struct TruthTable {
  Mat table;
  Vec prior;
};

// Semantic mutual information: sum p(x,y) log2[ T(y|x) / T(y) ] with
// T(y) = sum_x prior(x) T(y|x). DomainError when a zero truth value carries
// positive joint mass. Reduces to Shannon MI when table(x, y) = p(y|x) and
// prior is the x-marginal of joint.
double semantic_mi(const TruthTable& tt, const Mat& joint);

// Induced semantic distortion d(x, y) = -log2 table(x, y); +inf at zeros.
Mat semantic_distortion(const TruthTable& tt);

/**
 * Indirect rate-distortion for the scalar Gaussian sensing model
 * X = a S + W, S ~ N(0, var_s), W ~ N(0, var_w): the least rate at which a
 * code over X can reconstruct S within mean squared error d_s and X within
 * d_x. The semantic target is infeasible below the MMSE floor
 * var_s var_w / (a^2 var_s + var_w). Returns bits.
 */
double indirect_rd_scalar(double var_s, double var_w, double a, double d_s,
                          double d_x, double tol = 1e-12);

}  // namespace wncs::info
