#pragma once

#include <Eigen/Dense>

#include "wncs/errors.hpp"

namespace wncs {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Tolerance on the minimum eigenvalue when deciding positive semidefiniteness.
inline constexpr double kPsdTol = 1e-9;

// Condition-number cap for the symmetric solves inside the Riccati updates.
inline constexpr double kMaxCondition = 1e12;

inline Mat symmetrize(const Mat& x) { return 0.5 * (x + x.transpose()); }

inline double min_eigenvalue(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(sym),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline bool is_psd(const Mat& x, double tol = kPsdTol) {
  if (x.rows() != x.cols()) return false;
  return min_eigenvalue(x) >= -tol;
}

/**
 * Solve S * X = B for symmetric positive (semi)definite S, with a condition
 * estimate from the eigenvalue spread. Throws NumericalError when S is
 * singular or its condition estimate exceeds kMaxCondition.
 */
inline Mat solve_spd(const Mat& s, const Mat& b, const char* what) {
  const Mat sym = symmetrize(s);
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const Vec ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (hi <= 0.0 || lo <= 0.0 || hi / lo > kMaxCondition) {
    throw NumericalError(std::string(what) +
                         ": matrix singular or ill-conditioned");
  }
  Mat y = es.eigenvectors().transpose() * b;
  y.array().colwise() /= ev.array();
  return es.eigenvectors() * y;
}

/**
 * Symmetric square root of a PSD matrix, clamping slightly negative
 * eigenvalues to zero so singular covariances (e.g. V = 0) still factor.
 */
inline Mat psd_sqrt(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(x));
  Vec ev = es.eigenvalues();
  if (ev.minCoeff() < -kPsdTol) {
    throw DomainError("psd_sqrt: matrix is not positive semidefinite");
  }
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// M^t by binary exponentiation, t >= 0.
inline Mat mat_power(const Mat& m, long t) {
  Mat result = Mat::Identity(m.rows(), m.cols());
  Mat base = m;
  for (long e = t; e > 0; e >>= 1) {
    if (e & 1) result = result * base;
    if (e > 1) base = base * base;
  }
  return result;
}

// Largest singular value.
inline double max_singular_value(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
}

}  // namespace wncs
