#include "ripsel/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ripsel {

std::string_view to_string(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::RestrictedInvertibility: return "restricted-invertibility";
    case SelectionKind::NormBound: return "norm-bound";
  }
  return "unknown";
}

SelectionKind selection_kind_from_string(std::string_view s) {
  if (s == "restricted-invertibility") return SelectionKind::RestrictedInvertibility;
  if (s == "norm-bound") return SelectionKind::NormBound;
  throw InvalidInput("unknown selection kind '" + std::string(s) + "'");
}

namespace {

// floor(x), except that x within 1e-10 (relative) below an integer counts as that integer.
Index snapped_floor(double x) {
  const double f = std::floor(x);
  if ((f + 1.0) - x <= 1e-10 * std::max(1.0, x)) return static_cast<Index>(f + 1.0);
  return static_cast<Index>(f);
}

Index snapped_ceil(double x) {
  const double c = std::ceil(x);
  if (x - (c - 1.0) <= 1e-12 * std::max(1.0, x)) return static_cast<Index>(c - 1.0);
  return static_cast<Index>(c);
}

void check_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0,1)");
}

double potential_tolerance(double reference) { return 1e-9 * std::max(1.0, std::abs(reference)); }

[[noreturn]] void breakdown(const std::string& what, SelectionCertificate cert, const std::vector<Index>& sigma) {
  cert.sigma = sigma;
  throw SelectionBreakdown(what, std::move(cert));
}

} // namespace

double feasibility_slack(double hs_norm_sq) { return 1e-9 * std::max(1.0, hs_norm_sq); }

Index ri_target_size(const DenseMatrix& u, double eps) {
  check_epsilon(eps);
  const double op = operator_norm(u);
  if (op == 0.0) throw InvalidInput("U must be nonzero");
  const double hs = hs_norm(u);
  const double raw = (1.0 - eps) * (1.0 - eps) * (hs * hs) / (op * op);
  const Index k = std::max<Index>(1, snapped_floor(raw));
  return std::min({k, u.rows(), u.cols()});
}

double phi_potential(const DenseMatrix& u, const SymMatrix& a, double b) {
  if (a.dim() != u.rows()) throw InvalidInput("phi_potential: dimension mismatch");
  const Spectrum spec = sym_eigen(a);
  return shifted_trace(spec, b, projected_diagonal(spec, SymMatrix::gram(u.values())));
}

double psi_potential(const DenseMatrix& u, const SymMatrix& a, double barrier) {
  if (a.dim() != u.rows()) throw InvalidInput("psi_potential: dimension mismatch");
  const Spectrum spec = sym_eigen(a);
  // Tr(U^t (uI - A)^{-1} U) = -Tr(U^t (A - uI)^{-1} U)
  return -shifted_trace(spec, barrier, projected_diagonal(spec, SymMatrix::gram(u.values())));
}

// ---------------------------------------------------------------------------
// Lower barrier
// ---------------------------------------------------------------------------

LowerBarrierState LowerBarrierState::start(const DenseMatrix& u, const DiagonalWeights& d, double eps) {
  check_epsilon(eps);
  const Index n = u.rows();
  LowerBarrierState st{SymMatrix(n), Spectrum{}, 0.0, 0.0, {}, 0, 0.0, SymMatrix::gram(u.values()), Vector{}, 0.0};
  const double hs_sq = hs_norm(u) * hs_norm(u);
  const double op = operator_norm(u);
  if (op == 0.0) throw InvalidInput("U must be nonzero");
  st.op_norm_sq = op * op;
  const double dn = d.hs_norm_sq();
  st.b = eps * hs_sq / dn;
  st.delta = eps / (1.0 - eps) * st.op_norm_sq / dn;
  st.spectrum = sym_eigen(st.a);
  st.gram_projection = projected_diagonal(st.spectrum, st.gram);
  st.phi = shifted_trace(st.spectrum, st.b, st.gram_projection);
  return st;
}

void LowerBarrierState::advance(const DenseMatrix& u, const DiagonalWeights& d, Index j, double next_barrier) {
  const Vector v = u.column(j) / d[j];
  a.add_rank_one(v);
  sigma.push_back(j);
  ++step;
  b = next_barrier;
  spectrum = sym_eigen(a);
  gram_projection = projected_diagonal(spectrum, gram);
  phi = shifted_trace(spectrum, b, gram_projection);
}

RiFeasibility ri_feasible(const LowerBarrierState& state, const DenseMatrix& u, const DiagonalWeights& d, Index j) {
  if (j < 0 || j >= u.cols()) throw InvalidInput("ri_feasible: column index out of range");
  if (!d.in_support(j)) {
    std::ostringstream os;
    os << "ri_feasible: column " << j + 1 << " is outside the weight support";
    throw InvalidInput(os.str());
  }
  const double next_b = state.b - state.delta;
  const double phi_shifted = shifted_trace(state.spectrum, next_b, state.gram_projection);
  const double drop = state.phi - phi_shifted;
  const Vector v = u.column(j);
  const ShiftedQuadratics q = shifted_quadratics(state.spectrum, next_b, v);
  RiFeasibility out;
  out.lhs = q.q2;
  out.rhs = drop / state.op_norm_sq * (-d[j] * d[j] - q.q1);
  out.margin = out.rhs - out.lhs;
  const double hs = hs_norm(u);
  out.feasible = out.margin >= -feasibility_slack(hs * hs);
  return out;
}

namespace {

// Number of the leading eigenvalues expected to be nonzero must sit above the barrier,
// the rest must be numerically zero.
void check_lower_spectrum(const LowerBarrierState& st, SelectionCertificate& cert) {
  const double scale = std::max(1.0, st.spectrum.max());
  bool ok = true;
  for (Index i = 0; i < st.spectrum.dim(); ++i) {
    const double lam = st.spectrum.values(i);
    if (i < st.step) {
      if (!(lam > st.b + 1e-12 * scale)) ok = false;
    } else if (std::abs(lam) > 1e-9 * scale) {
      ok = false;
    }
  }
  if (!ok) {
    std::ostringstream os;
    os << "step " << st.step << ": spectrum of A does not separate at barrier " << st.b;
    cert.warnings.push_back(os.str());
  }
}

double ri_aggregate_margin(const LowerBarrierState& st, double dn, double next_b) {
  const double phi_shifted = shifted_trace(st.spectrum, next_b, st.gram_projection);
  const double lhs = shifted_trace(st.spectrum, next_b, st.gram_projection, 2);
  const double rhs = (st.phi - phi_shifted) / st.op_norm_sq * (-dn - phi_shifted);
  return rhs - lhs;
}

// Single step used when the target size had to be raised from 0 to 1: the barrier moves
// straight to eps^2 |U|_HS^2 / |D|_HS^2 and the column with the lowest resulting potential wins.
void ri_clamped_step(const DenseMatrix& u, const DiagonalWeights& d, LowerBarrierState& st, double final_b,
                     SelectionCertificate& cert) {
  const double hs_sq = cert.params.hs_norm * cert.params.hs_norm;
  Index best = -1;
  double best_phi = std::numeric_limits<double>::infinity();
  for (Index j : d.support()) {
    const Vector v = u.column(j) / d[j];
    const double r = v.squaredNorm();
    if (!(r > final_b * (1.0 + 1e-12))) continue;
    const Vector dir = v / std::sqrt(r);
    const double g = dir.dot(st.gram.values() * dir);
    const double phi = g / (r - final_b) - (hs_sq - g) / final_b;
    if (phi < best_phi) {
      best_phi = phi;
      best = j;
    }
  }
  if (best < 0) breakdown("numerical breakdown: no column clears the final barrier", cert, st.sigma);

  StepRecord rec;
  rec.chosen_index = best;
  rec.barrier_before = st.b;
  rec.potential_before = st.phi;
  rec.aggregate_margin = std::numeric_limits<double>::quiet_NaN();
  st.advance(u, d, best, final_b);
  rec.barrier_after = st.b;
  rec.potential_after = st.phi;
  rec.feasibility_margin = rec.potential_before - rec.potential_after;
  rec.spectral_edge = st.spectrum.values(0);
  cert.trace.push_back(rec);
  cert.warnings.push_back("target size clamped from 0 to 1; single step taken directly to the final barrier");
  if (rec.potential_after > rec.potential_before + potential_tolerance(rec.potential_before)) {
    cert.warnings.push_back("clamped step increased the potential");
  }
}

} // namespace

SelectionCertificate ri_select(const DenseMatrix& u, const DiagonalWeights& d, double eps) {
  check_epsilon(eps);
  d.check_compatible(u);
  const double hs = hs_norm(u);
  if (hs == 0.0) throw InvalidInput("U must be nonzero");

  LowerBarrierState st = LowerBarrierState::start(u, d, eps);
  const double hs_sq = hs * hs;
  const double dn = d.hs_norm_sq();
  const double stable_rank = hs_sq / st.op_norm_sq;
  const double final_target = eps * eps * hs_sq / dn;
  const double tau = feasibility_slack(hs_sq);

  SelectionCertificate cert;
  cert.kind = SelectionKind::RestrictedInvertibility;
  cert.target_size = ri_target_size(u, eps);
  cert.claimed_bound = eps * hs / std::sqrt(dn);
  auto& p = cert.params;
  p.epsilon = eps;
  p.delta = st.delta;
  p.initial_barrier = st.b;
  p.initial_potential = st.phi;
  p.op_norm = std::sqrt(st.op_norm_sq);
  p.hs_norm = hs;
  p.weights_hs_norm = std::sqrt(dn);
  p.stable_rank = stable_rank;
  p.clamped = snapped_floor((1.0 - eps) * (1.0 - eps) * stable_rank) == 0;
  p.alphas.assign(d.alphas().data(), d.alphas().data() + d.size());

  if (p.clamped) {
    ri_clamped_step(u, d, st, final_target, cert);
  } else {
    const std::vector<Index> support = d.support();
    while (st.step < cert.target_size) {
      const double next_b = st.b - st.delta;
      if (!(next_b > 0.0)) breakdown("numerical breakdown: barrier reached zero", cert, st.sigma);

      Index best = -1;
      double best_ratio = -std::numeric_limits<double>::infinity();
      double best_margin = 0.0;
      Index least_bad = -1;
      double least_bad_margin = -std::numeric_limits<double>::infinity();
      for (Index j : support) {
        if (std::find(st.sigma.begin(), st.sigma.end(), j) != st.sigma.end()) continue;
        RiFeasibility f;
        try {
          f = ri_feasible(st, u, d, j);
        } catch (const NumericalError& e) {
          breakdown(std::string("numerical breakdown: ") + e.what(), cert, st.sigma);
        }
        if (f.margin > least_bad_margin) {
          least_bad_margin = f.margin;
          least_bad = j;
        }
        if (f.feasible && f.rhs > 0.0) {
          const double ratio = f.margin / f.rhs;
          if (ratio > best_ratio) {
            best_ratio = ratio;
            best = j;
            best_margin = f.margin;
          }
        }
      }
      if (least_bad < 0) breakdown("numerical breakdown: no candidate columns left", cert, st.sigma);
      if (best < 0) {
        best = least_bad;
        best_margin = least_bad_margin;
        std::ostringstream os;
        os << "step " << st.step + 1 << ": no column met the step condition within slack " << tau
           << "; took least-violating column " << best + 1;
        cert.warnings.push_back(os.str());
      } else if (best_margin < 0.0) {
        std::ostringstream os;
        os << "step " << st.step + 1 << ": feasibility met only with roundoff slack";
        cert.warnings.push_back(os.str());
      }

      StepRecord rec;
      rec.chosen_index = best;
      rec.barrier_before = st.b;
      rec.potential_before = st.phi;
      rec.feasibility_margin = best_margin;
      rec.aggregate_margin = ri_aggregate_margin(st, dn, next_b);
      try {
        st.advance(u, d, best, next_b);
      } catch (const NumericalError& e) {
        breakdown(std::string("numerical breakdown: ") + e.what(), cert, st.sigma);
      }
      rec.barrier_after = st.b;
      rec.potential_after = st.phi;
      rec.spectral_edge = st.spectrum.values(st.step - 1);
      cert.trace.push_back(rec);
      check_lower_spectrum(st, cert);
      if (rec.potential_after > rec.potential_before + potential_tolerance(rec.potential_before)) {
        std::ostringstream os;
        os << "step " << st.step << ": potential increased";
        cert.warnings.push_back(os.str());
      }
    }
  }

  cert.sigma = st.sigma;
  p.final_barrier = st.b;
  p.barrier_bound = st.b > 0.0 ? std::sqrt(st.b) : 0.0;
  cert.achieved = smin_restricted(u, cert.sigma, d);
  if (cert.achieved < (1.0 - 1e-6) * cert.claimed_bound) {
    cert.warnings.push_back("achieved smallest singular value is below the claimed bound");
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Upper barrier
// ---------------------------------------------------------------------------

namespace {

void check_kt_params(Index m, double lambda, double eta) {
  if (m < 1) throw InvalidInput("matrix must have at least one column");
  if (!(lambda < 1.0) || !(lambda * static_cast<double>(m) >= 1.0 - 1e-12)) {
    throw InvalidInput("lambda must lie in [1/m, 1)");
  }
  if (!(eta >= lambda) || !(eta < 1.0)) throw InvalidInput("eta must lie in [lambda, 1)");
}

} // namespace

Index kt_target_size(Index m, double lambda) {
  check_kt_params(m, lambda, lambda);
  return std::min<Index>(m, std::max<Index>(1, snapped_ceil(lambda * static_cast<double>(m))));
}

double kt_bound(double lambda, double eta, double op_norm, double hs_norm, Index m) {
  return (std::sqrt(lambda + eta) * op_norm + std::sqrt(1.0 + lambda / eta) * hs_norm / std::sqrt(double(m))) /
         std::sqrt(1.0 - lambda);
}

UpperBarrierState UpperBarrierState::start(const DenseMatrix& u, double lambda, double eta, double delta) {
  check_kt_params(u.cols(), lambda, eta);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("delta must be positive");
  const Index n = u.rows();
  const double m = static_cast<double>(u.cols());
  UpperBarrierState st{SymMatrix(n), Spectrum{}, 0.0, delta, 0.0, {}, 0, 0.0, SymMatrix::gram(u.values()), Vector{}, 0.0};
  const double op = operator_norm(u);
  if (op == 0.0) throw InvalidInput("U must be nonzero");
  const double hs = hs_norm(u);
  st.op_norm_sq = op * op;
  st.u = eta * m * delta;
  const double alpha = hs * hs / st.u;
  st.s = (1.0 - lambda) * m / (alpha + st.op_norm_sq / delta);
  st.spectrum = sym_eigen(st.a);
  st.gram_projection = projected_diagonal(st.spectrum, st.gram);
  st.psi = -shifted_trace(st.spectrum, st.u, st.gram_projection);
  return st;
}

void UpperBarrierState::advance(const DenseMatrix& mat, Index j) {
  a.add_rank_one(mat.column(j), s);
  sigma.push_back(j);
  ++step;
  u += delta;
  spectrum = sym_eigen(a);
  gram_projection = projected_diagonal(spectrum, gram);
  psi = -shifted_trace(spectrum, u, gram_projection);
}

KtFeasibility kt_feasible(const UpperBarrierState& state, const DenseMatrix& u, Index j) {
  if (j < 0 || j >= u.cols()) throw InvalidInput("kt_feasible: column index out of range");
  const double next_u = state.u + state.delta;
  const double psi_next = -shifted_trace(state.spectrum, next_u, state.gram_projection);
  const double drop = state.psi - psi_next;
  const ShiftedQuadratics q = shifted_quadratics(state.spectrum, next_u, u.column(j));
  // (A - u'I)^{-1} = -(u'I - A)^{-1}; the squared resolvent is sign-free.
  KtFeasibility out;
  out.f_value = q.q2 / drop * state.op_norm_sq - q.q1;
  out.threshold = 1.0 / state.s;
  const double hs = hs_norm(u);
  out.feasible = out.f_value <= out.threshold + feasibility_slack(hs * hs);
  return out;
}

SelectionCertificate kt_select(const DenseMatrix& u, double lambda, std::optional<double> eta_opt, double delta) {
  const double eta = eta_opt.value_or(lambda);
  const Index m = u.cols();
  check_kt_params(m, lambda, eta);

  UpperBarrierState st = UpperBarrierState::start(u, lambda, eta, delta);
  const double hs = hs_norm(u);
  const double op = std::sqrt(st.op_norm_sq);
  const double alpha = hs * hs / st.u;

  SelectionCertificate cert;
  cert.kind = SelectionKind::NormBound;
  cert.target_size = kt_target_size(m, lambda);
  cert.claimed_bound = kt_bound(lambda, eta, op, hs, m);
  auto& p = cert.params;
  p.lambda = lambda;
  p.eta = eta;
  p.delta = delta;
  p.initial_barrier = st.u;
  p.initial_potential = st.psi;
  p.column_weight = st.s;
  p.op_norm = op;
  p.hs_norm = hs;
  p.stable_rank = hs * hs / st.op_norm_sq;
  if (eta == lambda) {
    p.particular_bound =
        std::sqrt(2.0) / std::sqrt(1.0 - lambda) * (std::sqrt(lambda) * op + hs / std::sqrt(double(m)));
  }

  while (st.step < cert.target_size) {
    Index best = -1;
    double best_f = std::numeric_limits<double>::infinity();
    double f_sum = 0.0;
    const double threshold = 1.0 / st.s;
    for (Index j = 0; j < m; ++j) {
      if (std::find(st.sigma.begin(), st.sigma.end(), j) != st.sigma.end()) continue;
      KtFeasibility f;
      try {
        f = kt_feasible(st, u, j);
      } catch (const NumericalError& e) {
        breakdown(std::string("numerical breakdown: ") + e.what(), cert, st.sigma);
      }
      f_sum += f.f_value;
      if (f.f_value < best_f) {
        best_f = f.f_value;
        best = j;
      }
    }
    if (best < 0) breakdown("numerical breakdown: no candidate columns left", cert, st.sigma);
    const double tau = feasibility_slack(hs * hs);
    if (best_f > threshold + tau) {
      std::ostringstream os;
      os << "step " << st.step + 1 << ": no column met F <= 1/s within slack; took minimizer " << best + 1;
      cert.warnings.push_back(os.str());
    } else if (best_f > threshold) {
      std::ostringstream os;
      os << "step " << st.step + 1 << ": feasibility met only with roundoff slack";
      cert.warnings.push_back(os.str());
    }

    StepRecord rec;
    rec.chosen_index = best;
    rec.barrier_before = st.u;
    rec.potential_before = st.psi;
    rec.feasibility_margin = threshold - best_f;
    rec.aggregate_margin = (st.op_norm_sq / st.delta + alpha) - f_sum;
    try {
      st.advance(u, best);
    } catch (const NumericalError& e) {
      breakdown(std::string("numerical breakdown: ") + e.what(), cert, st.sigma);
    }
    rec.barrier_after = st.u;
    rec.potential_after = st.psi;
    rec.spectral_edge = st.spectrum.max();
    cert.trace.push_back(rec);
    if (!(rec.spectral_edge < st.u)) {
      std::ostringstream os;
      os << "step " << st.step << ": lambda_max(A) reached the upper barrier";
      cert.warnings.push_back(os.str());
    }
    if (rec.potential_after > rec.potential_before + potential_tolerance(rec.potential_before)) {
      std::ostringstream os;
      os << "step " << st.step << ": potential increased";
      cert.warnings.push_back(os.str());
    }
  }

  cert.sigma = st.sigma;
  p.final_barrier = st.u;
  p.barrier_bound = std::sqrt(st.u / st.s);
  cert.achieved = operator_norm(u.select_columns(cert.sigma));
  if (cert.achieved > (1.0 + 1e-6) * cert.claimed_bound) {
    cert.warnings.push_back("achieved norm exceeds the claimed bound");
  }
  return cert;
}

} // namespace ripsel
