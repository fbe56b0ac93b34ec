#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ripsel/error.hpp"

namespace ripsel {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A finite real n x m matrix with n, m >= 1.
class DenseMatrix {
public:
  /// Throws InvalidInput if the matrix is empty or holds a NaN/Inf.
  explicit DenseMatrix(Matrix values);

  [[nodiscard]] Index rows() const noexcept { return values_.rows(); }
  [[nodiscard]] Index cols() const noexcept { return values_.cols(); }
  [[nodiscard]] const Matrix& values() const noexcept { return values_; }
  [[nodiscard]] auto column(Index j) const { return values_.col(j); }
  [[nodiscard]] double operator()(Index i, Index j) const { return values_(i, j); }

  /// The n x |columns| matrix made of the listed columns, in order.
  [[nodiscard]] Matrix select_columns(std::span<const Index> columns) const;

private:
  Matrix values_;
};

/// Real symmetric matrix. Symmetry is exact: every mutation writes both triangles
/// from the same value.
class SymMatrix {
public:
  explicit SymMatrix(Index dim) : values_(Matrix::Zero(dim, dim)) {}

  /// Builds from the lower triangle of `m`, mirroring it onto the upper one.
  static SymMatrix from_lower(const Matrix& m);
  /// The Gram matrix U U^t, accumulated column by column in index order.
  static SymMatrix gram(const Matrix& u);

  [[nodiscard]] Index dim() const noexcept { return values_.rows(); }
  [[nodiscard]] const Matrix& values() const noexcept { return values_; }
  [[nodiscard]] double operator()(Index i, Index j) const { return values_(i, j); }

  /// this += weight * v v^t
  void add_rank_one(const Vector& v, double weight = 1.0);

private:
  Matrix values_;
};

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending.
struct Spectrum {
  Vector values;
  Matrix vectors; ///< columns are orthonormal eigenvectors

  [[nodiscard]] Index dim() const noexcept { return values.size(); }
  [[nodiscard]] double max() const { return values(0); }
};

struct ShiftedQuadratics {
  double q1; ///< v^t (A - tI)^{-1} v
  double q2; ///< v^t (A - tI)^{-2} v
};

/// Full symmetric eigendecomposition. Deterministic for identical input bits.
/// Throws NumericalError naming the dimension if the solver fails to converge.
Spectrum sym_eigen(const SymMatrix& s);

/// Relative gap below which a shift is treated as an eigenvalue.
inline constexpr double kCollisionGap = 1e-12;

/// Evaluates v^t (A - tI)^{-1} v and v^t (A - tI)^{-2} v through the spectrum of A.
/// Throws NumericalError("barrier collision ...") if t sits on an eigenvalue.
ShiftedQuadratics shifted_quadratics(const Spectrum& spec, double t, const Vector& v);

/// sum_i weights_i / (lambda_i - t)^power for power 1 or 2, with the same collision guard.
double shifted_trace(const Spectrum& spec, double t, const Vector& weights, int power = 1);

/// Diagonal of Q^t S Q for the eigenbasis Q of `spec`.
Vector projected_diagonal(const Spectrum& spec, const SymMatrix& s);

/// Largest singular value.
double operator_norm(const Matrix& u);
inline double operator_norm(const DenseMatrix& u) { return operator_norm(u.values()); }

/// Hilbert-Schmidt (Frobenius) norm, summed in fixed index order.
double hs_norm(const Matrix& u);
inline double hs_norm(const DenseMatrix& u) { return hs_norm(u.values()); }

/// All singular values in descending order (one-sided Jacobi SVD).
Vector singular_values(const Matrix& u);

/// Smallest singular value of an n x k matrix, counting the k - n structural zeros when k > n.
double smallest_singular_value(const Matrix& u);

class DiagonalWeights;

/// s_min(U_sigma D_sigma^{-1}): smallest singular value of the columns U e_j / alpha_j, j in sigma.
double smin_restricted(const DenseMatrix& u, std::span<const Index> sigma, const DiagonalWeights& d);

/// Orthonormal basis (as columns) of the orthogonal complement of span(vectors) in R^dim.
/// Rank is decided at 1e-8 relative to the largest singular value. May have zero columns.
Matrix orth_complement_basis(std::span<const Vector> vectors, Index dim);

/// Numerical rank at threshold rel_tol * s_max.
Index numerical_rank(const Matrix& m, double rel_tol = 1e-8);

/// The diagonal matrix D = diag(alpha_j) with support Gamma_D = { j : alpha_j != 0 }.
class DiagonalWeights {
public:
  explicit DiagonalWeights(Vector alphas);

  static DiagonalWeights identity(Index m);
  /// alpha_j = |U e_j|_2, the normalized-column form.
  static DiagonalWeights column_norms(const DenseMatrix& u);

  [[nodiscard]] Index size() const noexcept { return alphas_.size(); }
  [[nodiscard]] double operator[](Index j) const { return alphas_(j); }
  [[nodiscard]] const Vector& alphas() const noexcept { return alphas_; }
  [[nodiscard]] bool in_support(Index j) const { return alphas_(j) != 0.0; }
  [[nodiscard]] std::vector<Index> support() const;
  [[nodiscard]] double hs_norm_sq() const;

  /// Operational Ker(D) subset Ker(U): every column outside the support has
  /// |U e_j|_2 <= 1e-10 max(1, |U|_HS). Throws InvalidInput listing offenders.
  void check_compatible(const DenseMatrix& u) const;

private:
  Vector alphas_;
};

} // namespace ripsel
