#include "ripsel/generate.hpp"

#include <cmath>
#include <random>

namespace ripsel {

namespace {

Matrix normal_matrix(Index n, Index m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw InvalidInput("generator dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(n, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) out(i, j) = normal(rng);
  }
  return out;
}

} // namespace

DenseMatrix gaussian_matrix(Index n, Index m, std::uint64_t seed) { return DenseMatrix(normal_matrix(n, m, seed)); }

DiagonalWeights random_positive_weights(Index m, std::uint64_t seed, double lo, double hi) {
  if (!(lo > 0.0 && hi >= lo)) throw InvalidInput("weight range must satisfy 0 < lo <= hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(lo, hi);
  Vector a(m);
  for (Index j = 0; j < m; ++j) a(j) = uni(rng);
  return DiagonalWeights(std::move(a));
}

PointSet random_symmetric_body(Index n, Index m, std::uint64_t seed) {
  if (m < n) throw InvalidInput("a full-dimensional body needs at least n points");
  const Matrix pts = normal_matrix(n, m, seed);
  std::vector<Vector> v;
  for (Index j = 0; j < m; ++j) v.emplace_back(pts.col(j));
  return PointSet(n, std::move(v), true);
}

JohnDecomposition random_identity_decomposition(Index n, Index m, std::uint64_t seed) {
  if (m < n) throw InvalidInput("an identity decomposition needs at least n points");
  const Matrix y = normal_matrix(n, m, seed);
  const Spectrum ss = sym_eigen(SymMatrix::gram(y));
  if (!(ss.values(n - 1) > 0.0)) throw NumericalError("random decomposition: directions do not span");
  const Matrix inv_root = ss.vectors * ss.values.cwiseSqrt().cwiseInverse().asDiagonal() * ss.vectors.transpose();
  JohnDecomposition d;
  for (Index j = 0; j < m; ++j) {
    const Vector z = inv_root * y.col(j);
    const double len = z.norm();
    d.points.push_back(z / len);
    d.weights.push_back(len * len);
    d.source.push_back(j);
  }
  return d;
}

} // namespace ripsel
