#pragma once

#include <optional>
#include <vector>

#include "ripsel/barrier.hpp"
#include "ripsel/john.hpp"

namespace ripsel {

/// Proportional Dvoretzky-Rogers selection for a symmetric body in John position:
///   eps |a|_2 <= |sum a_j x_j|_2 <= |sum a_j x_j|_X <= |a|_1,   j in sigma.
/// Only the lower side is evaluated; the upper side is the triangle inequality.
struct DrSymResult {
  std::vector<Index> sigma;   ///< indices into the decomposition
  std::vector<Vector> points; ///< x_j, j in sigma
  double epsilon = 0.0;
  double lower_constant = 0.0;  ///< s_min of [x_j]_{j in sigma}
  Index min_size = 0;           ///< max(1, floor((1-eps)^2 n))
  double l1_distance_bound = 0.0;  ///< sqrt(n)/eps, derived report field
  SelectionCertificate certificate;
};

struct DrNonsymResult {
  std::vector<Index> sigma;   ///< final selection (subset of sigma1)
  std::vector<Index> sigma1;  ///< first pass, ascending
  std::vector<std::vector<Index>> groups;  ///< partition of sigma1
  Matrix projection;          ///< P, n x n, onto span{x_j : j in sigma1} cap span{z_l}^perp
  Matrix coordinate_projection;         ///< P' = T^{-1} P T on R^{sigma1}
  Matrix coordinate_row_projection;     ///< P'' onto (Ker P')^perp
  Index rank_p = 0;
  Index rank_p2 = 0;  ///< numerical rank of P''
  double epsilon = 0.0;

  double first_pass_smin = 0.0;   ///< s_min(T) = 1/|T^{-1}|
  double second_pass_smin = 0.0;  ///< s_min of (P'' e_j)_{j in sigma}
  double chain_constant = 0.0;    ///< product of the two
  double lower_constant = 0.0;    ///< s_min of (P x_j)_{j in sigma}, computed directly
  double nominal_lower = 0.0;     ///< eps^2 / 16
  Index upper_group_bound = 0;    ///< max_l(|A_l| - 1)
  double nominal_upper = 0.0;     ///< 4 / eps
  Index group_size_cap = 0;       ///< floor(4/eps) + 1

  double max_group_residual = 0.0;   ///< max_l |P z_l|_2
  double idempotence_residual = 0.0; ///< |P'' P' - P''|_max
  bool second_pass_capped = false;   ///< second-pass target would have exceeded rank P''
  bool size_below_nominal = false;   ///< |sigma| < floor((1-eps) n)
  double projected_l1_distance_bound = 0.0;  ///< 64 sqrt(n)/eps^3, derived report field

  SelectionCertificate first_pass;
  SelectionCertificate second_pass;
  std::vector<std::string> warnings;
};

/// How cube_basis turns eps into a selection size.
enum class SizeConvention {
  TwoEpsilon,  ///< require k >= (1 - 2 eps) n, raise the selector's parameter as far as that allows
  Direct,      ///< select with parameter eps itself, k = floor((1 - eps)^2 n)
};

struct CubeBasisResult {
  Matrix t;  ///< n x n: selected contact points, then complement vectors of length 1/d
  Index k = 0;
  std::vector<Index> sigma;
  double epsilon = 0.0;        ///< requested (or default) eps
  double selector_epsilon = 0.0;  ///< parameter passed to the selector
  double d = 0.0;
  double achieved_smin = 0.0;
  double c_low = 0.0;          ///< c_low |a|_1 <= |T a|_2 for all a
  double claimed_bound = 0.0;  ///< 2^{4/3} sqrt(n) d^{2/3}
  double one_ellipsoid_bound = 0.0;  ///< 2^{5/6} sqrt(n) d^{2/3}; equals (2n)^{5/6} at d = sqrt(n)
  SizeConvention convention = SizeConvention::TwoEpsilon;
  DrSymResult selection;
};

DrSymResult dr_symmetric(const JohnDecomposition& decomp, double eps);

DrNonsymResult dr_nonsymmetric(const JohnDecomposition& decomp, double eps);

/// (sqrt(2) d)^{-2/3}; (2n)^{-1/3} for d = sqrt(n).
double default_cube_epsilon(Index n, std::optional<double> d = std::nullopt);

CubeBasisResult cube_basis(const JohnDecomposition& decomp, std::optional<double> eps = std::nullopt,
                           std::optional<double> d = std::nullopt,
                           SizeConvention convention = SizeConvention::TwoEpsilon);

/// Root in (0,1) of eps / sqrt((1-eps)^2 n) = 1 / (n sqrt(1 - (1-eps)^2)), by bisection to 1e-12.
double optimize_eps(Index n);

} // namespace ripsel
