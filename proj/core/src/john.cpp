#include "ripsel/john.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ripsel {

PointSet::PointSet(Index n, std::vector<Vector> pts, bool sym) : dim(n), points(std::move(pts)), symmetric(sym) {
  if (dim < 1) throw InvalidInput("point set dimension must be positive");
  if (points.empty()) throw InvalidInput("point set is empty");
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != dim) throw InvalidInput("point set: inconsistent point dimension");
    if (!points[j].allFinite()) throw InvalidInput("point set: non-finite coordinate");
    if (points[j].squaredNorm() == 0.0) {
      std::ostringstream os;
      os << "point set: point " << j + 1 << " is zero";
      throw InvalidInput(os.str());
    }
  }
}

PointSet PointSet::from_rows(const Matrix& rows, bool symmetric) {
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(rows.rows()));
  for (Index i = 0; i < rows.rows(); ++i) pts.emplace_back(rows.row(i).transpose());
  return PointSet(rows.cols(), std::move(pts), symmetric);
}

Matrix PointSet::as_columns() const {
  Matrix out(dim, size());
  for (Index j = 0; j < size(); ++j) out.col(j) = points[static_cast<std::size_t>(j)];
  return out;
}

Matrix JohnDecomposition::as_columns() const {
  Matrix out(dim(), size());
  for (Index j = 0; j < size(); ++j) out.col(j) = points[static_cast<std::size_t>(j)];
  return out;
}

bool DecompositionReport::passes(Index n) const {
  return identity_residual <= 1e-10 * static_cast<double>(n) && std::abs(trace_defect) <= 1e-8 &&
         max_norm_defect <= 1e-8;
}

double contact_threshold(Index n, Index m) { return 1e-9 * static_cast<double>(n) / static_cast<double>(m); }

namespace {

// g_j = x_j^t X^{-1} x_j with X = sum u_j x_j x_j^t, recomputed through a Cholesky factor.
struct MomentInverse {
  Matrix inverse;
  Vector g;
};

MomentInverse fresh_inverse(const Matrix& x, const Vector& u) {
  const Index n = x.rows();
  SymMatrix moment(n);
  for (Index j = 0; j < x.cols(); ++j) {
    if (u(j) > 0.0) moment.add_rank_one(x.col(j), u(j));
  }
  Eigen::LLT<Matrix> llt(moment.values());
  if (llt.info() != Eigen::Success) throw NumericalError("mvee: moment matrix lost positive definiteness");
  MomentInverse out{llt.solve(Matrix::Identity(n, n)), Vector(x.cols())};
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
  for (Index j = 0; j < x.cols(); ++j) out.g(j) = x.col(j).dot(out.inverse * x.col(j));
  return out;
}

} // namespace

MveeResult mvee(const PointSet& ps, double tol, Index max_iter) {
  if (!ps.symmetric) throw InvalidInput("mvee supports symmetric bodies only");
  if (!(tol > 0.0)) throw InvalidInput("mvee tolerance must be positive");
  const Matrix x = ps.as_columns();
  const Index n = ps.dim;
  const Index m = ps.size();
  if (numerical_rank(x) < n) throw InvalidInput("body not full-dimensional");

  const double nd = static_cast<double>(n);
  Vector u = Vector::Constant(m, 1.0 / static_cast<double>(m));
  MomentInverse mi = fresh_inverse(x, u);

  Index iter = 0;
  double gap = 0.0;
  for (;; ++iter) {
    Index jp = 0;
    Index jm = -1;
    for (Index j = 0; j < m; ++j) {
      if (mi.g(j) > mi.g(jp)) jp = j;
      if (u(j) > 0.0 && (jm < 0 || mi.g(j) < mi.g(jm))) jm = j;
    }
    const double eps_plus = mi.g(jp) / nd - 1.0;
    const double eps_minus = 1.0 - mi.g(jm) / nd;
    gap = std::max(eps_plus, eps_minus);
    if (gap <= tol) break;
    if (iter >= max_iter) {
      std::ostringstream os;
      os << "mvee did not converge in " << max_iter << " iterations (final gap " << gap << ")";
      throw NumericalError(os.str());
    }

    Index j;
    double tau;
    if (eps_plus >= eps_minus) {
      j = jp;
      tau = (mi.g(j) - nd) / (nd * (mi.g(j) - 1.0));
    } else {
      j = jm;
      const double drop = -u(j) / (1.0 - u(j));
      tau = mi.g(j) <= 1.0 + 1e-12 ? drop : std::max(drop, (mi.g(j) - nd) / (nd * (mi.g(j) - 1.0)));
    }

    const Vector xj = x.col(j);
    const Vector w = mi.inverse * xj;
    const double gj = mi.g(j);
    const double denom = (1.0 - tau) + tau * gj;
    u *= (1.0 - tau);
    u(j) += tau;
    if (u(j) < 1e-300) u(j) = 0.0;

    if ((iter + 1) % 256 == 0) {
      mi = fresh_inverse(x, u);
    } else {
      const double scale = 1.0 / (1.0 - tau);
      for (Index i = 0; i < m; ++i) {
        const double c = x.col(i).dot(w);
        mi.g(i) = scale * (mi.g(i) - tau * c * c / denom);
      }
      mi.inverse = scale * (mi.inverse - (tau / denom) * (w * w.transpose()));
    }
  }

  mi = fresh_inverse(x, u);
  const double gmax = mi.g.maxCoeff();
  MveeResult res{SymMatrix::from_lower(mi.inverse / gmax), u, {}, iter, gap};
  const double thr = contact_threshold(n, m);
  for (Index j = 0; j < m; ++j) {
    if (u(j) > thr) res.contact_indices.push_back(j);
  }
  return res;
}

JohnDecomposition whiten_decomposition(const MveeResult& res, const PointSet& ps) {
  const Index n = ps.dim;
  const Index m = ps.size();
  if (res.weights.size() != m || res.shape.dim() != n) throw InvalidInput("whiten: MVEE result does not match point set");

  // M^{1/2}
  const Spectrum ms = sym_eigen(res.shape);
  if (!(ms.values(n - 1) > 0.0)) throw NumericalError("whiten: ellipsoid shape is not positive definite");
  const Matrix root = ms.vectors * ms.values.cwiseSqrt().asDiagonal() * ms.vectors.transpose();

  const double thr = contact_threshold(n, m);
  std::vector<Vector> ys;
  std::vector<double> cs;
  std::vector<Index> src;
  SymMatrix s(n);
  for (Index j = 0; j < m; ++j) {
    if (!(res.weights(j) > thr)) continue;
    Vector y = root * ps.points[static_cast<std::size_t>(j)];
    const double c = static_cast<double>(n) * res.weights(j);
    s.add_rank_one(y, c);
    ys.push_back(std::move(y));
    cs.push_back(c);
    src.push_back(j);
  }

  const Spectrum ss = sym_eigen(s);
  if (!(ss.values(n - 1) > 1e-12 * std::max(1.0, ss.max()))) throw NumericalError("whiten: moment matrix is singular");
  const Matrix inv_root = ss.vectors * ss.values.cwiseSqrt().cwiseInverse().asDiagonal() * ss.vectors.transpose();

  JohnDecomposition out;
  out.position = inv_root * root;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const Vector z = inv_root * ys[i];
    const double len = z.norm();
    out.points.push_back(z / len);
    out.weights.push_back(cs[i] * len * len);
    out.source.push_back(src[i]);
  }
  return out;
}

DecompositionReport validate_decomposition(const JohnDecomposition& d) {
  DecompositionReport rep;
  const Index n = d.dim();
  if (n == 0) throw InvalidInput("decomposition is empty");
  if (d.weights.size() != d.points.size()) throw InvalidInput("decomposition: weight and point counts differ");
  SymMatrix sum(n);
  double trace = 0.0;
  for (std::size_t j = 0; j < d.points.size(); ++j) {
    if (d.points[j].size() != n) throw InvalidInput("decomposition: inconsistent point dimension");
    sum.add_rank_one(d.points[j], d.weights[j]);
    trace += d.weights[j];
    rep.max_norm_defect = std::max(rep.max_norm_defect, std::abs(d.points[j].norm() - 1.0));
  }
  rep.identity_residual = hs_norm(sum.values() - Matrix::Identity(n, n));
  rep.trace_defect = trace - static_cast<double>(n);
  return rep;
}

JohnDecomposition cross_polytope_decomposition(Index n) {
  if (n < 1) throw InvalidInput("dimension must be positive");
  JohnDecomposition d;
  for (Index i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector e = Vector::Zero(n);
      e(i) = sign;
      d.points.push_back(std::move(e));
      d.weights.push_back(0.5);
      d.source.push_back(static_cast<Index>(d.source.size()));
    }
  }
  d.position = Matrix::Identity(n, n);
  return d;
}

JohnDecomposition regular_simplex_decomposition(Index n) {
  if (n < 1) throw InvalidInput("dimension must be positive");
  const Index big = n + 1;
  const std::vector<Vector> ones{Vector::Ones(big)};
  const Matrix basis = orth_complement_basis(ones, big);  // (n+1) x n
  JohnDecomposition d;
  const double c = static_cast<double>(n) / static_cast<double>(big);
  for (Index j = 0; j < big; ++j) {
    Vector e = Vector::Constant(big, -1.0 / static_cast<double>(big));
    e(j) += 1.0;
    Vector v = basis.transpose() * e;
    v /= v.norm();
    d.points.push_back(std::move(v));
    d.weights.push_back(c);
    d.source.push_back(j);
  }
  return d;
}

} // namespace ripsel
