#pragma once

#include <cstdint>

#include "ripsel/john.hpp"
#include "ripsel/linalg.hpp"

namespace ripsel {

// Seeded instance generators. Streams come from std::mt19937_64, so outputs are
// reproducible on one standard library implementation.

/// n x m matrix of independent standard normals.
DenseMatrix gaussian_matrix(Index n, Index m, std::uint64_t seed);

/// m weights drawn uniformly from [lo, hi].
DiagonalWeights random_positive_weights(Index m, std::uint64_t seed, double lo = 0.5, double hi = 2.0);

/// m Gaussian points in R^n; the body is their symmetric hull.
PointSet random_symmetric_body(Index n, Index m, std::uint64_t seed);

/// Identity decomposition from m Gaussian directions, whitened: x_j = S^{-1/2} y_j / |S^{-1/2} y_j|,
/// c_j = |S^{-1/2} y_j|^2 with S = sum y_j y_j^t. No symmetry or barycenter condition.
JohnDecomposition random_identity_decomposition(Index n, Index m, std::uint64_t seed);

} // namespace ripsel
