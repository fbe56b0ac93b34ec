#include "ripsel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ripsel {

DenseMatrix::DenseMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw InvalidInput("matrix must have at least one row and one column");
  }
  for (Index j = 0; j < values_.cols(); ++j) {
    for (Index i = 0; i < values_.rows(); ++i) {
      if (!std::isfinite(values_(i, j))) {
        std::ostringstream os;
        os << "matrix entry (" << i + 1 << "," << j + 1 << ") is not finite";
        throw InvalidInput(os.str());
      }
    }
  }
}

Matrix DenseMatrix::select_columns(std::span<const Index> columns) const {
  Matrix out(rows(), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const Index j = columns[c];
    if (j < 0 || j >= cols()) throw InvalidInput("column index out of range");
    out.col(static_cast<Index>(c)) = values_.col(j);
  }
  return out;
}

SymMatrix SymMatrix::from_lower(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("symmetric matrix must be square");
  SymMatrix s(m.rows());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = j; i < m.rows(); ++i) {
      s.values_(i, j) = m(i, j);
      s.values_(j, i) = m(i, j);
    }
  }
  return s;
}

SymMatrix SymMatrix::gram(const Matrix& u) {
  SymMatrix g(u.rows());
  for (Index j = 0; j < u.cols(); ++j) g.add_rank_one(u.col(j));
  return g;
}

void SymMatrix::add_rank_one(const Vector& v, double weight) {
  if (v.size() != dim()) throw InvalidInput("rank-one update dimension mismatch");
  for (Index j = 0; j < dim(); ++j) {
    const double wj = weight * v(j);
    for (Index i = j; i < dim(); ++i) {
      values_(i, j) += wj * v(i);
      values_(j, i) = values_(i, j);
    }
  }
}

Spectrum sym_eigen(const SymMatrix& s) {
  if (!s.values().allFinite()) throw InvalidInput("sym_eigen: matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.values(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "symmetric eigensolver did not converge on a " << s.dim() << "x" << s.dim() << " matrix";
    throw NumericalError(os.str());
  }
  // Eigen returns ascending order.
  const Index n = s.dim();
  Spectrum out{Vector(n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

namespace {

double collision_scale(const Spectrum& spec, double t) {
  double scale = std::max(1.0, std::abs(t));
  if (spec.dim() > 0) {
    scale = std::max({scale, std::abs(spec.values(0)), std::abs(spec.values(spec.dim() - 1))});
  }
  return scale;
}

[[noreturn]] void throw_collision(double t, double lambda) {
  std::ostringstream os;
  os.precision(17);
  os << "barrier collision: shift " << t << " coincides with eigenvalue " << lambda;
  throw NumericalError(os.str());
}

} // namespace

ShiftedQuadratics shifted_quadratics(const Spectrum& spec, double t, const Vector& v) {
  if (v.size() != spec.dim()) throw InvalidInput("shifted_quadratics: dimension mismatch");
  const double gap = kCollisionGap * collision_scale(spec, t);
  ShiftedQuadratics out{0.0, 0.0};
  for (Index i = 0; i < spec.dim(); ++i) {
    const double d = spec.values(i) - t;
    if (std::abs(d) <= gap) throw_collision(t, spec.values(i));
    const double c = spec.vectors.col(i).dot(v);
    const double c2 = c * c;
    out.q1 += c2 / d;
    out.q2 += c2 / (d * d);
  }
  return out;
}

double shifted_trace(const Spectrum& spec, double t, const Vector& weights, int power) {
  if (weights.size() != spec.dim()) throw InvalidInput("shifted_trace: dimension mismatch");
  if (power != 1 && power != 2) throw InvalidInput("shifted_trace: power must be 1 or 2");
  const double gap = kCollisionGap * collision_scale(spec, t);
  double sum = 0.0;
  for (Index i = 0; i < spec.dim(); ++i) {
    const double d = spec.values(i) - t;
    if (std::abs(d) <= gap) throw_collision(t, spec.values(i));
    sum += power == 1 ? weights(i) / d : weights(i) / (d * d);
  }
  return sum;
}

Vector projected_diagonal(const Spectrum& spec, const SymMatrix& s) {
  if (s.dim() != spec.dim()) throw InvalidInput("projected_diagonal: dimension mismatch");
  Vector out(spec.dim());
  for (Index i = 0; i < spec.dim(); ++i) {
    const Vector q = spec.vectors.col(i);
    out(i) = q.dot(s.values() * q);
  }
  return out;
}

double operator_norm(const Matrix& u) {
  if (u.size() == 0) return 0.0;
  // Eigenvalues of the smaller Gram matrix; lambda_max is relatively well conditioned.
  const SymMatrix g = u.rows() <= u.cols() ? SymMatrix::gram(u) : SymMatrix::gram(u.transpose());
  const Spectrum spec = sym_eigen(g);
  return std::sqrt(std::max(0.0, spec.max()));
}

double hs_norm(const Matrix& u) {
  double sum = 0.0;
  for (Index j = 0; j < u.cols(); ++j) {
    for (Index i = 0; i < u.rows(); ++i) sum += u(i, j) * u(i, j);
  }
  return std::sqrt(sum);
}

Vector singular_values(const Matrix& u) {
  if (u.size() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(u);
  return svd.singularValues();
}

double smallest_singular_value(const Matrix& u) {
  if (u.cols() > u.rows()) return 0.0;
  const Vector sv = singular_values(u);
  return sv.size() == 0 ? 0.0 : sv(sv.size() - 1);
}

double smin_restricted(const DenseMatrix& u, std::span<const Index> sigma, const DiagonalWeights& d) {
  if (sigma.empty()) throw InvalidInput("smin_restricted: sigma is empty");
  if (d.size() != u.cols()) throw InvalidInput("smin_restricted: weight count does not match column count");
  Matrix cols = u.select_columns(sigma);
  for (std::size_t c = 0; c < sigma.size(); ++c) {
    const Index j = sigma[c];
    if (!d.in_support(j)) {
      std::ostringstream os;
      os << "weight support violation: column " << j + 1 << " has alpha = 0";
      throw InvalidInput(os.str());
    }
    cols.col(static_cast<Index>(c)) /= d[j];
  }
  return smallest_singular_value(cols);
}

Index numerical_rank(const Matrix& m, double rel_tol) {
  const Vector sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rel_tol * sv(0);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++r;
  }
  return r;
}

Matrix orth_complement_basis(std::span<const Vector> vectors, Index dim) {
  if (dim < 1) throw InvalidInput("orth_complement_basis: dimension must be positive");
  if (vectors.empty()) return Matrix::Identity(dim, dim);
  Matrix stacked(dim, static_cast<Index>(vectors.size()));
  for (std::size_t c = 0; c < vectors.size(); ++c) {
    if (vectors[c].size() != dim) throw InvalidInput("orth_complement_basis: vector dimension mismatch");
    stacked.col(static_cast<Index>(c)) = vectors[c];
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullU);
  const Vector& sv = svd.singularValues();
  Index rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    const double cut = 1e-8 * sv(0);
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cut) ++rank;
    }
  }
  return svd.matrixU().rightCols(dim - rank);
}

DiagonalWeights::DiagonalWeights(Vector alphas) : alphas_(std::move(alphas)) {
  if (alphas_.size() < 1) throw InvalidInput("weights must be non-empty");
  if (!alphas_.allFinite()) throw InvalidInput("weights must be finite");
  if (hs_norm_sq() <= 0.0) throw InvalidInput("weights must not all vanish (|D|_HS = 0)");
}

DiagonalWeights DiagonalWeights::identity(Index m) { return DiagonalWeights(Vector::Ones(m)); }

DiagonalWeights DiagonalWeights::column_norms(const DenseMatrix& u) {
  Vector a(u.cols());
  for (Index j = 0; j < u.cols(); ++j) a(j) = u.column(j).norm();
  return DiagonalWeights(std::move(a));
}

std::vector<Index> DiagonalWeights::support() const {
  std::vector<Index> out;
  for (Index j = 0; j < size(); ++j) {
    if (in_support(j)) out.push_back(j);
  }
  return out;
}

double DiagonalWeights::hs_norm_sq() const {
  double sum = 0.0;
  for (Index j = 0; j < alphas_.size(); ++j) sum += alphas_(j) * alphas_(j);
  return sum;
}

void DiagonalWeights::check_compatible(const DenseMatrix& u) const {
  if (size() != u.cols()) {
    std::ostringstream os;
    os << "weights have " << size() << " entries, matrix has " << u.cols() << " columns";
    throw InvalidInput(os.str());
  }
  const double tol = 1e-10 * std::max(1.0, hs_norm(u));
  std::vector<Index> offenders;
  for (Index j = 0; j < size(); ++j) {
    if (!in_support(j) && u.column(j).norm() > tol) offenders.push_back(j);
  }
  if (!offenders.empty()) {
    std::ostringstream os;
    os << "kernel compatibility violated (alpha_j = 0 but U e_j != 0) at columns";
    for (Index j : offenders) os << ' ' << j + 1;
    throw InvalidInput(os.str());
  }
}

} // namespace ripsel
