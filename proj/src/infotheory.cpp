#include "wncs/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wncs::info {
namespace {

constexpr double kLog2e = 1.4426950408889634;  // 1 / ln 2
constexpr double kInf = std::numeric_limits<double>::infinity();

double log2_safe(double x) { return std::log(x) * kLog2e; }

// KL(p || q) in nats over the support of p; +inf when q vanishes there.
double kl_nats(const Vec& p, const Vec& q) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    if (q(i) <= 0.0) return kInf;
    total += p(i) * std::log(p(i) / q(i));
  }
  return total;
}

double mi_bits(const Mat& joint, const Vec& px, const Vec& py) {
  double total = 0.0;
  for (Eigen::Index x = 0; x < joint.rows(); ++x) {
    for (Eigen::Index y = 0; y < joint.cols(); ++y) {
      const double p = joint(x, y);
      if (p <= 0.0) continue;
      total += p * log2_safe(p / (px(x) * py(y)));
    }
  }
  return total;
}

}  // namespace

void check_distribution(const Vec& p) {
  if (p.size() < 1) {
    throw InvalidDistribution("distribution must be non-empty");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= 0.0)) {
      throw InvalidDistribution("distribution has a negative or NaN entry");
    }
    total += p(i);
  }
  if (std::abs(total - 1.0) > kMassTol) {
    throw InvalidDistribution("distribution mass is not 1");
  }
}

void check_joint(const Mat& joint) {
  if (joint.rows() < 1 || joint.cols() < 1) {
    throw InvalidDistribution("joint table must be non-empty");
  }
  double total = 0.0;
  for (Eigen::Index x = 0; x < joint.rows(); ++x) {
    for (Eigen::Index y = 0; y < joint.cols(); ++y) {
      if (!(joint(x, y) >= 0.0)) {
        throw InvalidDistribution("joint table has a negative or NaN entry");
      }
      total += joint(x, y);
    }
  }
  if (std::abs(total - 1.0) > kMassTol) {
    throw InvalidDistribution("joint table mass is not 1");
  }
}

double entropy(const Vec& p) {
  check_distribution(p);
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) total -= p(i) * log2_safe(p(i));
  }
  return total;
}

double mutual_information(const Mat& joint) {
  check_joint(joint);
  const Vec px = joint.rowwise().sum();
  const Vec py = joint.colwise().sum();
  return mi_bits(joint, px, py);
}

Joint3::Joint3(std::vector<Mat> slices) : slices_(std::move(slices)) {
  if (slices_.empty()) {
    throw InvalidDistribution("three-way joint needs at least one z slice");
  }
  const Eigen::Index rows = slices_.front().rows();
  const Eigen::Index cols = slices_.front().cols();
  if (rows < 1 || cols < 1) {
    throw InvalidDistribution("three-way joint slices must be non-empty");
  }
  double total = 0.0;
  for (const Mat& s : slices_) {
    if (s.rows() != rows || s.cols() != cols) {
      throw DimensionError("three-way joint slices differ in shape");
    }
    for (Eigen::Index x = 0; x < rows; ++x) {
      for (Eigen::Index y = 0; y < cols; ++y) {
        if (!(s(x, y) >= 0.0)) {
          throw InvalidDistribution("three-way joint has a negative entry");
        }
        total += s(x, y);
      }
    }
  }
  if (std::abs(total - 1.0) > kMassTol) {
    throw InvalidDistribution("three-way joint mass is not 1");
  }
}

double conditional_mi(const Joint3& joint) {
  double total = 0.0;
  for (Eigen::Index z = 0; z < joint.nz(); ++z) {
    const Mat& s = joint.slice(z);
    const double pz = s.sum();
    if (pz <= 0.0) continue;
    const Vec pxz = s.rowwise().sum();
    const Vec pyz = s.colwise().sum();
    for (Eigen::Index x = 0; x < joint.nx(); ++x) {
      for (Eigen::Index y = 0; y < joint.ny(); ++y) {
        const double p = s(x, y);
        if (p <= 0.0) continue;
        total += p * log2_safe(p * pz / (pxz(x) * pyz(y)));
      }
    }
  }
  return total;
}

double gaussian_rd(double variance, double distortion) {
  if (!(variance > 0.0) || !(distortion > 0.0)) {
    throw DomainError("gaussian_rd: variance and distortion must be positive");
  }
  if (distortion >= variance) return 0.0;
  return 0.5 * log2_safe(variance / distortion);
}

RdPoint blahut_arimoto(const Vec& p_x, const Mat& d, double beta, double tol,
                       long max_iter) {
  check_distribution(p_x);
  if (d.rows() != p_x.size() || d.cols() < 1) {
    throw DimensionError("blahut_arimoto: distortion table shape mismatch");
  }
  if (!d.allFinite()) {
    throw DomainError("blahut_arimoto: distortion entries must be finite");
  }
  if (!(beta >= 0.0)) {
    throw DomainError("blahut_arimoto: beta must be nonnegative");
  }
  const Eigen::Index nx = d.rows();
  const Eigen::Index nr = d.cols();

  if (beta == 0.0) {
    // Zero-rate endpoint: the single best reproduction letter.
    Eigen::Index best = 0;
    double best_d = kInf;
    for (Eigen::Index r = 0; r < nr; ++r) {
      const double avg = p_x.dot(d.col(r));
      if (avg < best_d) {
        best_d = avg;
        best = r;
      }
    }
    RdPoint point;
    point.rate = 0.0;
    point.distortion = best_d;
    point.encoder = Mat::Zero(nx, nr);
    point.encoder.col(best).setOnes();
    return point;
  }

  Vec q = Vec::Constant(nr, 1.0 / static_cast<double>(nr));
  Mat enc = Mat::Zero(nx, nr);
  for (long iter = 0; iter < max_iter; ++iter) {
    for (Eigen::Index x = 0; x < nx; ++x) {
      // Row-wise shift of the exponent keeps exp() away from underflow.
      const double dmin = d.row(x).minCoeff();
      double z = 0.0;
      for (Eigen::Index r = 0; r < nr; ++r) {
        const double w = q(r) * std::exp(-beta * (d(x, r) - dmin));
        enc(x, r) = w;
        z += w;
      }
      if (z <= 0.0) {
        // All surviving letters underflowed for this x; pin the cheapest.
        Eigen::Index r_best = 0;
        d.row(x).minCoeff(&r_best);
        enc.row(x).setZero();
        enc(x, r_best) = 1.0;
        continue;
      }
      enc.row(x) /= z;
    }
    Vec q_next = Vec::Zero(nr);
    for (Eigen::Index x = 0; x < nx; ++x) {
      if (p_x(x) > 0.0) q_next += p_x(x) * enc.row(x).transpose();
    }
    const double delta = (q_next - q).cwiseAbs().maxCoeff();
    q = q_next;
    if (delta <= tol) {
      RdPoint point;
      point.encoder = enc;
      point.rate = 0.0;
      point.distortion = 0.0;
      for (Eigen::Index x = 0; x < nx; ++x) {
        if (p_x(x) <= 0.0) continue;
        for (Eigen::Index r = 0; r < nr; ++r) {
          const double w = enc(x, r);
          if (w <= 0.0) continue;
          point.rate += p_x(x) * w * log2_safe(w / q(r));
          point.distortion += p_x(x) * w * d(x, r);
        }
      }
      return point;
    }
  }
  throw NoConvergence("blahut_arimoto: no fixed point within max_iter");
}

IbResult ib_solve(const Mat& joint_xy, int t_size, double beta, Rng& rng,
                  double tol, long max_iter, int restarts) {
  check_joint(joint_xy);
  if (t_size < 1) {
    throw DomainError("ib_solve: t_size must be positive");
  }
  if (!(beta >= 0.0)) {
    throw DomainError("ib_solve: beta must be nonnegative");
  }
  if (restarts < 1) {
    throw DomainError("ib_solve: needs at least one restart");
  }
  const Eigen::Index nx = joint_xy.rows();
  const Eigen::Index ny = joint_xy.cols();
  const Eigen::Index nt = t_size;
  const Vec px = joint_xy.rowwise().sum();
  const Vec py = joint_xy.colwise().sum();

  // Conditionals p(y|x) for x with mass; zero-mass rows never matter.
  Mat py_given_x = Mat::Zero(nx, ny);
  for (Eigen::Index x = 0; x < nx; ++x) {
    if (px(x) > 0.0) py_given_x.row(x) = joint_xy.row(x) / px(x);
  }

  const auto objective = [&](const Mat& enc, const Vec& pt,
                             const Mat& py_given_t, double* i_xt_out,
                             double* i_ty_out) {
    double i_xt = 0.0;
    for (Eigen::Index x = 0; x < nx; ++x) {
      if (px(x) <= 0.0) continue;
      for (Eigen::Index t = 0; t < nt; ++t) {
        const double w = enc(x, t);
        if (w <= 0.0 || pt(t) <= 0.0) continue;
        i_xt += px(x) * w * log2_safe(w / pt(t));
      }
    }
    double i_ty = 0.0;
    for (Eigen::Index t = 0; t < nt; ++t) {
      if (pt(t) <= 0.0) continue;
      for (Eigen::Index y = 0; y < ny; ++y) {
        const double q = py_given_t(t, y);
        if (q <= 0.0 || py(y) <= 0.0) continue;
        i_ty += pt(t) * q * log2_safe(q / py(y));
      }
    }
    *i_xt_out = i_xt;
    *i_ty_out = i_ty;
    return i_xt - beta * i_ty;
  };

  bool have_best = false;
  IbResult best;
  for (int restart = 0; restart < restarts; ++restart) {
    Mat enc(nx, nt);
    for (Eigen::Index x = 0; x < nx; ++x) {
      double row_sum = 0.0;
      for (Eigen::Index t = 0; t < nt; ++t) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        enc(x, t) = -std::log(u);
        row_sum += enc(x, t);
      }
      enc.row(x) /= row_sum;
    }

    Vec pt = Vec::Zero(nt);
    Mat py_given_t = Mat::Zero(nt, ny);
    double prev_obj = kInf;
    bool converged = false;
    for (long iter = 0; iter < max_iter && !converged; ++iter) {
      pt.setZero();
      for (Eigen::Index x = 0; x < nx; ++x) {
        if (px(x) > 0.0) pt += px(x) * enc.row(x).transpose();
      }
      py_given_t.setZero();
      for (Eigen::Index t = 0; t < nt; ++t) {
        if (pt(t) <= 0.0) continue;
        for (Eigen::Index x = 0; x < nx; ++x) {
          if (px(x) <= 0.0) continue;
          py_given_t.row(t) += enc(x, t) * joint_xy.row(x) / pt(t);
        }
      }

      for (Eigen::Index x = 0; x < nx; ++x) {
        if (px(x) <= 0.0) continue;
        Vec logw = Vec::Constant(nt, -kInf);
        double top = -kInf;
        for (Eigen::Index t = 0; t < nt; ++t) {
          if (pt(t) <= 0.0) continue;
          const double div =
              kl_nats(py_given_x.row(x).transpose(),
                      py_given_t.row(t).transpose());
          if (div == kInf) continue;
          logw(t) = std::log(pt(t)) - beta * div;
          top = std::max(top, logw(t));
        }
        if (top == -kInf) {
          // Every live cluster has disjoint support from this x; fall back
          // to the cluster prior rather than dividing by zero.
          enc.row(x) = pt.transpose();
          const double z = enc.row(x).sum();
          if (z > 0.0) enc.row(x) /= z;
          continue;
        }
        double z = 0.0;
        for (Eigen::Index t = 0; t < nt; ++t) {
          const double w = logw(t) == -kInf ? 0.0 : std::exp(logw(t) - top);
          enc(x, t) = w;
          z += w;
        }
        enc.row(x) /= z;
      }

      pt.setZero();
      for (Eigen::Index x = 0; x < nx; ++x) {
        if (px(x) > 0.0) pt += px(x) * enc.row(x).transpose();
      }
      py_given_t.setZero();
      for (Eigen::Index t = 0; t < nt; ++t) {
        if (pt(t) <= 0.0) continue;
        for (Eigen::Index x = 0; x < nx; ++x) {
          if (px(x) <= 0.0) continue;
          py_given_t.row(t) += enc(x, t) * joint_xy.row(x) / pt(t);
        }
      }
      double i_xt = 0.0, i_ty = 0.0;
      const double obj = objective(enc, pt, py_given_t, &i_xt, &i_ty);
      if (std::abs(obj - prev_obj) <= tol) {
        converged = true;
        if (!have_best || obj < best.objective) {
          best.encoder = enc;
          best.i_xt = i_xt;
          best.i_ty = i_ty;
          best.objective = obj;
          have_best = true;
        }
      }
      prev_obj = obj;
    }
  }
  if (!have_best) {
    throw NoConvergence("ib_solve: no restart converged");
  }
  return best;
}

double semantic_mi(const TruthTable& tt, const Mat& joint) {
  check_joint(joint);
  check_distribution(tt.prior);
  if (tt.table.rows() != joint.rows() || tt.table.cols() != joint.cols() ||
      tt.prior.size() != joint.rows()) {
    throw DimensionError("semantic_mi: table/prior/joint shapes disagree");
  }
  for (Eigen::Index x = 0; x < tt.table.rows(); ++x) {
    for (Eigen::Index y = 0; y < tt.table.cols(); ++y) {
      const double t = tt.table(x, y);
      if (!(t >= 0.0) || t > 1.0) {
        throw DomainError("semantic_mi: truth values must lie in [0, 1]");
      }
    }
  }
  const Vec t_marginal = tt.table.transpose() * tt.prior;
  double total = 0.0;
  for (Eigen::Index x = 0; x < joint.rows(); ++x) {
    for (Eigen::Index y = 0; y < joint.cols(); ++y) {
      const double p = joint(x, y);
      if (p <= 0.0) continue;
      const double t = tt.table(x, y);
      if (t <= 0.0) {
        throw DomainError(
            "semantic_mi: zero truth value carries positive joint mass");
      }
      if (t_marginal(y) <= 0.0) {
        throw DomainError(
            "semantic_mi: truth marginal vanishes at a mass-carrying message");
      }
      total += p * log2_safe(t / t_marginal(y));
    }
  }
  return total;
}

Mat semantic_distortion(const TruthTable& tt) {
  Mat d(tt.table.rows(), tt.table.cols());
  for (Eigen::Index x = 0; x < tt.table.rows(); ++x) {
    for (Eigen::Index y = 0; y < tt.table.cols(); ++y) {
      const double t = tt.table(x, y);
      if (!(t >= 0.0) || t > 1.0) {
        throw DomainError(
            "semantic_distortion: truth values must lie in [0, 1]");
      }
      d(x, y) = t > 0.0 ? -log2_safe(t) : kInf;
    }
  }
  return d;
}

double indirect_rd_scalar(double var_s, double var_w, double a, double d_s,
                          double d_x, double tol) {
  if (!(var_s > 0.0) || !(var_w >= 0.0)) {
    throw DomainError("indirect_rd_scalar: bad source/noise variance");
  }
  if (!(d_s > 0.0) || !(d_x > 0.0)) {
    throw DomainError("indirect_rd_scalar: distortion targets must be positive");
  }
  if (!std::isfinite(a)) {
    throw DomainError("indirect_rd_scalar: gain must be finite");
  }
  const double var_x = a * a * var_s + var_w;
  const double floor = var_x > 0.0 ? var_s * var_w / var_x : var_s;
  if (d_s < floor) {
    throw Infeasible("indirect_rd_scalar: semantic target below MMSE floor");
  }
  if (var_x <= 0.0) return 0.0;  // X is degenerate, nothing to encode

  // Estimate-then-compress: code the MMSE estimate rho X with error budget
  // D; the semantic error then splits as rho^2 D + floor.
  const double rho = a * var_s / var_x;
  const double sem_cap =
      rho != 0.0 ? (d_s - floor) / (rho * rho)
                 : std::numeric_limits<double>::infinity();
  const double d_star = std::min(d_x, sem_cap);
  if (d_star <= 0.0) {
    throw Infeasible("indirect_rd_scalar: targets force zero coding error");
  }
  if (d_star >= var_x) return 0.0;

  // The binding error budget fixes the curve slope; bisect the Lagrange
  // multiplier b, for which the optimal budget is D(b) = 1 / (2 b ln 2).
  const double ln2 = std::log(2.0);
  double lo = 1.0 / (2.0 * var_x * ln2);
  double hi = lo;
  while (1.0 / (2.0 * hi * ln2) > d_star) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double budget = 1.0 / (2.0 * mid * ln2);
    if (budget > d_star) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(budget - d_star) <= tol * var_x) break;
  }
  const double d_final = 1.0 / (2.0 * hi * ln2);
  return 0.5 * log2_safe(var_x / d_final);
}

}  // namespace wncs::info
