#pragma once

#include <optional>
#include <vector>

#include "ripsel/linalg.hpp"

namespace ripsel {

/// Finite point set in R^n. With `symmetric` set the body is conv(+-points).
struct PointSet {
  PointSet(Index dim, std::vector<Vector> points, bool symmetric = true);
  /// Points are the rows of `rows` (m x n).
  static PointSet from_rows(const Matrix& rows, bool symmetric = true);

  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(points.size()); }
  /// n x m matrix of the points as columns.
  [[nodiscard]] Matrix as_columns() const;

  Index dim;
  std::vector<Vector> points;
  bool symmetric;
};

/// Ellipsoid { x : x^t M x <= 1 } enclosing conv(+-points).
struct MveeResult {
  SymMatrix shape;
  Vector weights;  ///< barycentric weights over the input points, sum 1
  std::vector<Index> contact_indices;
  Index iterations = 0;
  double final_gap = 0.0;  ///< max(g_max/n - 1, 1 - g_min/n) at termination
};

/// Contact points x_j and weights c_j with sum c_j x_j x_j^t = I.
struct JohnDecomposition {
  std::vector<Vector> points;
  std::vector<double> weights;
  std::vector<Index> source;      ///< index of the input point each x_j came from (when known)
  std::optional<Matrix> position; ///< linear map taking the input body to this position (when known)

  [[nodiscard]] Index dim() const { return points.empty() ? 0 : points.front().size(); }
  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(points.size()); }
  [[nodiscard]] Matrix as_columns() const;
};

struct DecompositionReport {
  double identity_residual = 0.0;  ///< |sum c_j x_j x_j^t - I|_HS
  double trace_defect = 0.0;       ///< sum c_j - n
  double max_norm_defect = 0.0;    ///< max_j | |x_j|_2 - 1 |

  /// Residual <= 1e-10 n, |trace defect| <= 1e-8, norm defect <= 1e-8.
  [[nodiscard]] bool passes(Index n) const;
};

/// Weight threshold marking a contact point: 1e-9 n / m.
double contact_threshold(Index n, Index m);

/// (1+tol)-approximate minimum-volume ellipsoid of a symmetric body, centered at 0,
/// by Khachiyan coordinate ascent with Todd-Yildirim away steps. The returned shape is
/// rescaled so the farthest point lies exactly on the boundary.
MveeResult mvee(const PointSet& ps, double tol = 1e-7, Index max_iter = 100000);

/// Turns approximate MVEE weights into an exact identity decomposition.
JohnDecomposition whiten_decomposition(const MveeResult& res, const PointSet& ps);

DecompositionReport validate_decomposition(const JohnDecomposition& d);

/// +-e_i with c = 1/2 each.
JohnDecomposition cross_polytope_decomposition(Index n);
/// The n+1 unit vertices of the regular simplex (pairwise inner product -1/n), c_j = n/(n+1).
JohnDecomposition regular_simplex_decomposition(Index n);

} // namespace ripsel
