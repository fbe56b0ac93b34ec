#pragma once

// Test-only reference computations. Deliberately naive: explicit inverses, brute-force
// sampling and closed forms, sharing no code path with the library's spectral routines.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd explicit_inverse(const MatrixXd& a) { return a.fullPivLu().inverse(); }

inline MatrixXd inverse_2x2(const MatrixXd& a) {
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  MatrixXd out(2, 2);
  out << a(1, 1) / det, -a(0, 1) / det, -a(1, 0) / det, a(0, 0) / det;
  return out;
}

inline double trace_potential(const MatrixXd& u, const MatrixXd& a, double b, bool two_by_two = false) {
  const MatrixXd shifted = a - b * MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd inv = two_by_two ? inverse_2x2(shifted) : explicit_inverse(shifted);
  return (u.transpose() * inv * u).trace();
}

struct Condition5 {
  double lhs;
  double rhs;
};

/// Both sides of the lower-barrier step condition for column j, from explicit inverses.
inline Condition5 lower_step_condition(const MatrixXd& u, const VectorXd& alphas, const MatrixXd& a, double b,
                                       double delta, Eigen::Index j, bool two_by_two = false) {
  const double next = b - delta;
  const MatrixXd shifted = a - next * MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd inv = two_by_two ? inverse_2x2(shifted) : explicit_inverse(shifted);
  const VectorXd v = u.col(j);
  const double op2 = (u * u.transpose()).eigenvalues().real().maxCoeff();
  const double drop = trace_potential(u, a, b, two_by_two) - trace_potential(u, a, next, two_by_two);
  const double lhs = v.dot(inv * inv * v);
  const double rhs = drop / op2 * (-alphas(j) * alphas(j) - v.dot(inv * v));
  return {lhs, rhs};
}

/// F_l(U e_j) of the upper-barrier step, from explicit inverses.
inline double upper_step_value(const MatrixXd& u, const MatrixXd& a, double barrier, double delta, Eigen::Index j) {
  const Eigen::Index n = a.rows();
  const MatrixXd r_now = explicit_inverse(barrier * MatrixXd::Identity(n, n) - a);
  const MatrixXd r_next = explicit_inverse((barrier + delta) * MatrixXd::Identity(n, n) - a);
  const double psi_now = (u.transpose() * r_now * u).trace();
  const double psi_next = (u.transpose() * r_next * u).trace();
  const double op2 = (u * u.transpose()).eigenvalues().real().maxCoeff();
  const VectorXd v = u.col(j);
  return v.dot(r_next * r_next * v) / (psi_now - psi_next) * op2 + v.dot(r_next * v);
}

/// min over `samples` random unit x of |M x|_2: an upper estimate of s_min(M).
inline double sampled_min_stretch(const MatrixXd& m, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    VectorXd x(m.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
    x.normalize();
    best = std::min(best, (m * x).norm());
  }
  return best;
}

/// Smallest singular value through the eigenvalues of the k x k Gram matrix.
inline double smin_via_gram(const MatrixXd& m) {
  if (m.cols() > m.rows()) return 0.0;
  const VectorXd ev = (m.transpose() * m).selfadjointView<Eigen::Lower>().eigenvalues();
  return std::sqrt(std::max(0.0, ev.minCoeff()));
}

inline double sum_of_column_norms_sq(const MatrixXd& m) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) s += m.col(j).squaredNorm();
  return s;
}

} // namespace oracle
