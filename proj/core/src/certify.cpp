#include "ripsel/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace ripsel {

bool VerificationReport::passed() const {
  return !clauses.empty() && std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.pass; });
}

const VerificationClause* VerificationReport::find(std::string_view name) const {
  for (const auto& c : clauses) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

constexpr double kTheoremSlack = 1e-6;
constexpr double kFormulaTolerance = 1e-12;
constexpr double kAchievedTolerance = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); }

double largest_sv(const Matrix& m) {
  const Vector sv = singular_values(m);
  return sv.size() == 0 ? 0.0 : sv(0);
}

void add(VerificationReport& rep, std::string name, bool pass, std::string detail) {
  rep.clauses.push_back({std::move(name), pass, std::move(detail)});
}

// Shared index checks; returns false if sigma cannot be used for recomputation.
bool check_indices(VerificationReport& rep, const SelectionCertificate& cert, Index m) {
  std::set<Index> seen;
  bool in_range = true;
  bool distinct = true;
  for (Index j : cert.sigma) {
    if (j < 0 || j >= m) in_range = false;
    if (!seen.insert(j).second) distinct = false;
  }
  add(rep, "indices-in-range", in_range, in_range ? "" : "sigma references a column outside 1..m");
  add(rep, "indices-distinct", distinct, distinct ? "" : "sigma repeats an index");
  return in_range && !cert.sigma.empty();
}

template <typename Visit>
void for_each_subset(const std::vector<Index>& pool, Index k, Visit visit) {
  const Index n = static_cast<Index>(pool.size());
  std::vector<Index> pick(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
  std::vector<Index> subset(static_cast<std::size_t>(k));
  while (true) {
    for (Index i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
    visit(subset);
    Index i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (Index t = i + 1; t < k; ++t) pick[static_cast<std::size_t>(t)] = pick[static_cast<std::size_t>(t - 1)] + 1;
  }
}

} // namespace

VerificationReport verify_ri(const DenseMatrix& u, const DiagonalWeights& d, const SelectionCertificate& cert) {
  VerificationReport rep;
  rep.kind = SelectionKind::RestrictedInvertibility;
  rep.slack = 1.0 - kTheoremSlack;
  add(rep, "kind", cert.kind == SelectionKind::RestrictedInvertibility, std::string(to_string(cert.kind)));
  if (d.size() != u.cols()) throw InvalidInput("verify_ri: weight count does not match column count");

  const double eps = cert.params.epsilon;
  const bool eps_ok = eps > 0.0 && eps < 1.0;
  add(rep, "parameter-range", eps_ok, "eps = " + fmt(eps));
  if (!eps_ok) return rep;

  const double op = largest_sv(u.values());
  const double hs = hs_norm(u);
  const double dn = std::sqrt(d.hs_norm_sq());
  const double raw = (1.0 - eps) * (1.0 - eps) * hs * hs / (op * op);
  rep.recomputed_target =
      std::min({std::max<Index>(1, static_cast<Index>(std::floor(raw + 1e-10 * std::max(1.0, raw)))), u.rows(), u.cols()});
  rep.recomputed_bound = eps * hs / dn;

  const Index size = static_cast<Index>(cert.sigma.size());
  add(rep, "size", size == rep.recomputed_target && cert.target_size == rep.recomputed_target,
      "|sigma| = " + std::to_string(size) + ", expected " + std::to_string(rep.recomputed_target));
  add(rep, "bound-formula", rel_close(cert.claimed_bound, rep.recomputed_bound, kFormulaTolerance),
      "claimed " + fmt(cert.claimed_bound) + ", recomputed " + fmt(rep.recomputed_bound));

  if (!check_indices(rep, cert, u.cols())) return rep;
  bool in_support = true;
  for (Index j : cert.sigma) in_support = in_support && d.in_support(j);
  add(rep, "support", in_support, in_support ? "" : "sigma leaves Gamma_D");
  if (!in_support) return rep;

  Matrix cols = u.select_columns(cert.sigma);
  for (std::size_t c = 0; c < cert.sigma.size(); ++c) cols.col(static_cast<Index>(c)) /= d[cert.sigma[c]];
  rep.recomputed_achieved = smallest_singular_value(cols);
  add(rep, "achieved-matches", rel_close(cert.achieved, rep.recomputed_achieved, kAchievedTolerance),
      "certificate " + fmt(cert.achieved) + ", recomputed " + fmt(rep.recomputed_achieved));
  add(rep, "independent", rep.recomputed_achieved > 0.0, "s_min = " + fmt(rep.recomputed_achieved));
  add(rep, "theorem-bound", rep.recomputed_achieved >= rep.slack * rep.recomputed_bound,
      fmt(rep.recomputed_achieved) + " >= (1-1e-6) * " + fmt(rep.recomputed_bound));
  return rep;
}

VerificationReport verify_kt(const DenseMatrix& u, const SelectionCertificate& cert) {
  VerificationReport rep;
  rep.kind = SelectionKind::NormBound;
  rep.slack = 1.0 + kTheoremSlack;
  add(rep, "kind", cert.kind == SelectionKind::NormBound, std::string(to_string(cert.kind)));

  const double lambda = cert.params.lambda;
  const double eta = cert.params.eta;
  const double m = static_cast<double>(u.cols());
  const bool range_ok = lambda * m >= 1.0 - 1e-12 && lambda <= eta && eta < 1.0;
  add(rep, "parameter-range", range_ok, "lambda = " + fmt(lambda) + ", eta = " + fmt(eta));
  if (!range_ok) return rep;

  const double op = largest_sv(u.values());
  const double hs = hs_norm(u);
  const double lm = lambda * m;
  rep.recomputed_target = static_cast<Index>(std::ceil(lm - 1e-12 * std::max(1.0, lm)));
  rep.recomputed_bound =
      (std::sqrt(lambda + eta) * op + std::sqrt(1.0 + lambda / eta) * hs / std::sqrt(m)) / std::sqrt(1.0 - lambda);

  const Index size = static_cast<Index>(cert.sigma.size());
  add(rep, "size", size == rep.recomputed_target && cert.target_size == rep.recomputed_target,
      "|sigma| = " + std::to_string(size) + ", expected " + std::to_string(rep.recomputed_target));
  add(rep, "bound-formula", rel_close(cert.claimed_bound, rep.recomputed_bound, kFormulaTolerance),
      "claimed " + fmt(cert.claimed_bound) + ", recomputed " + fmt(rep.recomputed_bound));

  if (!check_indices(rep, cert, u.cols())) return rep;
  rep.recomputed_achieved = largest_sv(u.select_columns(cert.sigma));
  add(rep, "achieved-matches", rel_close(cert.achieved, rep.recomputed_achieved, kAchievedTolerance),
      "certificate " + fmt(cert.achieved) + ", recomputed " + fmt(rep.recomputed_achieved));
  add(rep, "theorem-bound", rep.recomputed_achieved <= rep.slack * rep.recomputed_bound,
      fmt(rep.recomputed_achieved) + " <= (1+1e-6) * " + fmt(rep.recomputed_bound));
  if (eta == lambda) {
    const double particular = std::sqrt(2.0) / std::sqrt(1.0 - lambda) * (std::sqrt(lambda) * op + hs / std::sqrt(m));
    add(rep, "particular-bound", rep.recomputed_achieved <= rep.slack * particular,
        fmt(rep.recomputed_achieved) + " <= (1+1e-6) * " + fmt(particular));
  }
  return rep;
}

SubsetOptimum oracle_best_subset_smin(const DenseMatrix& u, const DiagonalWeights& d, Index k) {
  if (u.cols() > kOracleMaxColumns) throw InvalidInput("oracle refuses m > 12 (combinatorial blowup)");
  if (d.size() != u.cols()) throw InvalidInput("oracle: weight count does not match column count");
  const std::vector<Index> pool = d.support();
  if (k < 1 || k > static_cast<Index>(pool.size())) throw InvalidInput("oracle: k must lie in [1, |Gamma_D|]");
  SubsetOptimum best{{}, -1.0};
  for_each_subset(pool, k, [&](const std::vector<Index>& subset) {
    Matrix cols = u.select_columns(subset);
    for (std::size_t c = 0; c < subset.size(); ++c) cols.col(static_cast<Index>(c)) /= d[subset[c]];
    const double v = smallest_singular_value(cols);
    if (v > best.value) best = {subset, v};
  });
  return best;
}

SubsetOptimum oracle_best_subset_norm(const DenseMatrix& u, Index k) {
  if (u.cols() > kOracleMaxColumns) throw InvalidInput("oracle refuses m > 12 (combinatorial blowup)");
  if (k < 1 || k > u.cols()) throw InvalidInput("oracle: k must lie in [1, m]");
  std::vector<Index> pool(static_cast<std::size_t>(u.cols()));
  for (Index j = 0; j < u.cols(); ++j) pool[static_cast<std::size_t>(j)] = j;
  SubsetOptimum best{{}, std::numeric_limits<double>::infinity()};
  for_each_subset(pool, k, [&](const std::vector<Index>& subset) {
    const double v = largest_sv(u.select_columns(subset));
    if (v < best.value) best = {subset, v};
  });
  return best;
}

} // namespace ripsel
