#include "ripsel/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ripsel {

namespace {

void require_valid(const JohnDecomposition& decomp) {
  const DecompositionReport rep = validate_decomposition(decomp);
  if (!rep.passes(decomp.dim())) {
    std::ostringstream os;
    os << "decomposition residual above threshold (identity residual " << rep.identity_residual << ", trace defect "
       << rep.trace_defect << ", norm defect " << rep.max_norm_defect << ")";
    throw InvalidInput(os.str());
  }
}

// U = (sqrt(c_j) x_j), D = diag(sqrt(c_j)); then U U^t = I, |U| = 1, |U|_HS^2 = n.
std::pair<DenseMatrix, DiagonalWeights> john_operator(const JohnDecomposition& decomp) {
  const Index n = decomp.dim();
  const Index m = decomp.size();
  Matrix u(n, m);
  Vector alphas(m);
  for (Index j = 0; j < m; ++j) {
    const double r = std::sqrt(decomp.weights[static_cast<std::size_t>(j)]);
    u.col(j) = r * decomp.points[static_cast<std::size_t>(j)];
    alphas(j) = r;
  }
  return {DenseMatrix(std::move(u)), DiagonalWeights(std::move(alphas))};
}

Index floor_with_snap(double x) {
  const double f = std::floor(x);
  if ((f + 1.0) - x <= 1e-10 * std::max(1.0, x)) return static_cast<Index>(f + 1.0);
  return static_cast<Index>(f);
}

Index ceil_with_snap(double x) {
  const double c = std::ceil(x);
  if (x - (c - 1.0) <= 1e-10 * std::max(1.0, std::abs(x))) return static_cast<Index>(c - 1.0);
  return static_cast<Index>(c);
}

} // namespace

DrSymResult dr_symmetric(const JohnDecomposition& decomp, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0,1)");
  require_valid(decomp);
  const auto [u, d] = john_operator(decomp);
  const Index n = decomp.dim();

  DrSymResult out;
  out.epsilon = eps;
  out.certificate = ri_select(u, d, eps);
  out.sigma = out.certificate.sigma;
  Matrix cols(n, static_cast<Index>(out.sigma.size()));
  for (std::size_t c = 0; c < out.sigma.size(); ++c) {
    out.points.push_back(decomp.points[static_cast<std::size_t>(out.sigma[c])]);
    cols.col(static_cast<Index>(c)) = out.points.back();
  }
  out.lower_constant = smallest_singular_value(cols);
  out.min_size = std::max<Index>(1, floor_with_snap((1.0 - eps) * (1.0 - eps) * static_cast<double>(n)));
  out.l1_distance_bound = std::sqrt(static_cast<double>(n)) / eps;
  return out;
}

DrNonsymResult dr_nonsymmetric(const JohnDecomposition& decomp, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0,1)");
  require_valid(decomp);
  const Index n = decomp.dim();
  const double quarter = eps / 4.0;

  DrNonsymResult out;
  out.epsilon = eps;
  out.nominal_lower = eps * eps / 16.0;
  out.nominal_upper = 4.0 / eps;
  out.group_size_cap = static_cast<Index>(std::floor(4.0 / eps)) + 1;
  out.projected_l1_distance_bound = 64.0 * std::sqrt(static_cast<double>(n)) / (eps * eps * eps);

  // First pass: contact points x_j, j in sigma1, with s_min >= eps/4.
  {
    const auto [u, d] = john_operator(decomp);
    out.first_pass = ri_select(u, d, quarter);
  }
  out.sigma1 = out.first_pass.sigma;
  std::sort(out.sigma1.begin(), out.sigma1.end());
  const Index s = static_cast<Index>(out.sigma1.size());

  Matrix x1(n, s);
  for (Index c = 0; c < s; ++c) x1.col(c) = decomp.points[static_cast<std::size_t>(out.sigma1[c])];
  out.first_pass_smin = smallest_singular_value(x1);

  // Partition sigma1 into g groups of sizes differing by at most one, each of size >= 2.
  Index g = std::max<Index>(1, static_cast<Index>(std::floor(eps / 2.0 * static_cast<double>(s))));
  while (g > 0 && s / g < 2) --g;
  if (g == 0) out.warnings.push_back("first pass selected a single column; no groups formed, P is the identity on Y");
  {
    Index pos = 0;
    for (Index l = 0; l < g; ++l) {
      const Index size = s / g + (l < s % g ? 1 : 0);
      out.groups.emplace_back(out.sigma1.begin() + pos, out.sigma1.begin() + pos + size);
      pos += size;
    }
  }
  for (const auto& grp : out.groups) {
    out.upper_group_bound = std::max<Index>(out.upper_group_bound, static_cast<Index>(grp.size()) - 1);
  }

  // Orthonormal basis of Y and triangular factor: x1 = Q R.
  Eigen::HouseholderQR<Matrix> qr(x1);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, s);
  const Matrix r = q.transpose() * x1;  // upper triangular up to roundoff

  std::vector<Vector> z_coords;
  std::vector<Vector> z_full;
  for (const auto& grp : out.groups) {
    Vector z = Vector::Zero(n);
    for (Index j : grp) z += decomp.points[static_cast<std::size_t>(j)];
    z_full.push_back(z);
    z_coords.emplace_back(q.transpose() * z);
  }
  const Matrix b = orth_complement_basis(z_coords, s);  // s x (s - g)
  out.projection = q * b * b.transpose() * q.transpose();
  out.rank_p = b.cols();
  for (const Vector& z : z_full) {
    out.max_group_residual = std::max(out.max_group_residual, (out.projection * z).norm());
  }

  // P' = T^{-1} P T = R^{-1} B B^t R on R^{sigma1}; P'' projects onto its row space.
  const Matrix bbr = b * (b.transpose() * r);
  out.coordinate_projection = r.triangularView<Eigen::Upper>().solve(bbr);
  {
    Eigen::JacobiSVD<Matrix> svd(out.coordinate_projection, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    Index rank = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
      for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > 1e-8 * sv(0)) ++rank;
      }
    }
    const Matrix vr = svd.matrixV().leftCols(rank);
    out.coordinate_row_projection = vr * vr.transpose();
    out.rank_p2 = rank;
  }
  out.idempotence_residual =
      (out.coordinate_row_projection * out.coordinate_projection - out.coordinate_row_projection).cwiseAbs().maxCoeff();
  if (out.rank_p2 != out.rank_p) {
    std::ostringstream os;
    os << "rank P'' = " << out.rank_p2 << " differs from rank P = " << out.rank_p;
    out.warnings.push_back(os.str());
  }

  // Second pass on the columns of P'' with identity weights.
  const DenseMatrix u2(out.coordinate_row_projection);
  {
    const double op = operator_norm(u2);
    const double hs = hs_norm(u2);
    const double raw = (1.0 - quarter) * (1.0 - quarter) * hs * hs / (op * op);
    out.second_pass_capped = floor_with_snap(raw) > out.rank_p2;
  }
  out.second_pass = ri_select(u2, DiagonalWeights::identity(s), quarter);
  if (static_cast<Index>(out.second_pass.sigma.size()) > out.rank_p2) {
    out.second_pass.sigma.resize(static_cast<std::size_t>(out.rank_p2));
    out.second_pass_capped = true;
  }
  if (out.second_pass_capped) out.warnings.push_back("second-pass size capped at rank P''");
  for (Index i : out.second_pass.sigma) out.sigma.push_back(out.sigma1[static_cast<std::size_t>(i)]);

  const Matrix second_cols = u2.select_columns(out.second_pass.sigma);
  out.second_pass_smin = smallest_singular_value(second_cols);
  out.chain_constant = out.first_pass_smin * out.second_pass_smin;

  Matrix px(n, static_cast<Index>(out.sigma.size()));
  for (std::size_t c = 0; c < out.sigma.size(); ++c) {
    px.col(static_cast<Index>(c)) = out.projection * decomp.points[static_cast<std::size_t>(out.sigma[c])];
  }
  out.lower_constant = smallest_singular_value(px);

  const Index nominal_size = std::max<Index>(1, floor_with_snap((1.0 - eps) * static_cast<double>(n)));
  out.size_below_nominal = static_cast<Index>(out.sigma.size()) < nominal_size;
  if (out.size_below_nominal) {
    std::ostringstream os;
    os << "|sigma| = " << out.sigma.size() << " is below floor((1-eps)n) = " << nominal_size
       << "; rank P = " << out.rank_p;
    out.warnings.push_back(os.str());
  }
  return out;
}

double default_cube_epsilon(Index n, std::optional<double> d) {
  const double dd = d.value_or(std::sqrt(static_cast<double>(n)));
  return std::pow(std::sqrt(2.0) * dd, -2.0 / 3.0);
}

CubeBasisResult cube_basis(const JohnDecomposition& decomp, std::optional<double> eps, std::optional<double> d,
                           SizeConvention convention) {
  require_valid(decomp);
  const Index n = decomp.dim();
  const double nd = static_cast<double>(n);
  if (d && !(*d >= 1.0)) throw InvalidInput("d must be at least 1");
  if (eps && !(*eps > 0.0 && *eps < 1.0)) throw InvalidInput("eps must lie in (0,1)");

  CubeBasisResult out;
  out.convention = convention;
  out.d = d.value_or(std::sqrt(nd));
  out.epsilon = eps.value_or(default_cube_epsilon(n, out.d));
  // The selector needs eps < 1; the default exceeds 1 only when sqrt(2) d < 1, excluded above.
  out.epsilon = std::min(out.epsilon, 1.0 - 1e-12);

  if (convention == SizeConvention::TwoEpsilon) {
    const Index wanted = std::max<Index>(1, ceil_with_snap((1.0 - 2.0 * out.epsilon) * nd));
    out.selector_epsilon = std::max(out.epsilon, 1.0 - std::sqrt(static_cast<double>(wanted) / nd));
  } else {
    out.selector_epsilon = out.epsilon;
  }

  out.selection = dr_symmetric(decomp, out.selector_epsilon);
  out.sigma = out.selection.sigma;
  out.k = static_cast<Index>(out.sigma.size());
  out.achieved_smin = out.selection.lower_constant;

  const Matrix complement = orth_complement_basis(out.selection.points, n);
  if (complement.cols() != n - out.k) throw NumericalError("cube_basis: selected contact points are not independent");
  out.t.resize(n, n);
  for (Index c = 0; c < out.k; ++c) out.t.col(c) = out.selection.points[static_cast<std::size_t>(c)];
  out.t.rightCols(n - out.k) = complement / out.d;

  const double kd = static_cast<double>(out.k);
  if (out.k == n) {
    out.c_low = out.achieved_smin / std::sqrt(nd);
  } else {
    out.c_low = std::min(out.achieved_smin / std::sqrt(kd), 1.0 / (out.d * std::sqrt(nd - kd))) / std::sqrt(2.0);
  }
  out.claimed_bound = std::pow(2.0, 4.0 / 3.0) * std::sqrt(nd) * std::pow(out.d, 2.0 / 3.0);
  out.one_ellipsoid_bound = std::pow(2.0, 5.0 / 6.0) * std::sqrt(nd) * std::pow(out.d, 2.0 / 3.0);
  return out;
}

double optimize_eps(Index n) {
  if (n < 2) throw InvalidInput("optimize_eps needs n >= 2");
  const double nd = static_cast<double>(n);
  // Increasing in eps on (0,1): negative near 0, positive near 1.
  const auto f = [nd](double e) {
    return e / ((1.0 - e) * std::sqrt(nd)) - 1.0 / (nd * std::sqrt(1.0 - (1.0 - e) * (1.0 - e)));
  };
  double lo = 1e-15;
  double hi = 1.0 - 1e-15;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace ripsel
