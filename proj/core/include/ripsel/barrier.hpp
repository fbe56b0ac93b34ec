#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ripsel/linalg.hpp"

namespace ripsel {

enum class SelectionKind { RestrictedInvertibility, NormBound };

std::string_view to_string(SelectionKind kind);
SelectionKind selection_kind_from_string(std::string_view s);

/// One greedy step of a barrier selector.
struct StepRecord {
  Index chosen_index = -1;
  double barrier_before = 0.0;
  double barrier_after = 0.0;
  double potential_before = 0.0;
  double potential_after = 0.0;
  /// RHS - LHS of the per-column step condition; >= 0 means the column was provably admissible.
  double feasibility_margin = 0.0;
  /// RHS - LHS of the condition summed over all candidates (diagnostic only).
  double aggregate_margin = 0.0;
  /// RI: smallest of the `step` leading eigenvalues of A_{l+1}. KT: lambda_max(A_{l+1}).
  double spectral_edge = 0.0;
};

/// Parameters a selector ran with; every field needed to re-derive the bound.
struct SelectionParams {
  double epsilon = 0.0;  ///< RI
  double lambda = 0.0;   ///< KT
  double eta = 0.0;      ///< KT
  double delta = 0.0;
  double initial_barrier = 0.0;  ///< b_0 (RI) or u_0 (KT)
  double final_barrier = 0.0;    ///< b_k (RI) or u_k (KT)
  double column_weight = 0.0;    ///< s (KT)
  double initial_potential = 0.0;
  double op_norm = 0.0;          ///< |U|
  double hs_norm = 0.0;          ///< |U|_HS
  double weights_hs_norm = 0.0;  ///< |D|_HS (RI)
  double stable_rank = 0.0;
  bool clamped = false;          ///< RI target raised from 0 to 1
  std::optional<double> particular_bound;  ///< KT with eta = lambda
  double barrier_bound = 0.0;    ///< sqrt(u_k / s) for KT, sqrt(b_k) for RI
  std::vector<double> alphas;    ///< RI weights
};

struct SelectionCertificate {
  SelectionKind kind = SelectionKind::RestrictedInvertibility;
  std::vector<Index> sigma;  ///< 0-based, in selection order
  Index target_size = 0;
  double claimed_bound = 0.0;
  double achieved = 0.0;  ///< s_min(U_sigma D_sigma^{-1}) or |U_sigma|
  std::vector<StepRecord> trace;
  std::vector<std::string> warnings;
  SelectionParams params;
};

/// Running state of the lower-barrier (restricted invertibility) selector.
struct LowerBarrierState {
  SymMatrix a;        ///< sum over sigma of (U e_j / alpha_j)(U e_j / alpha_j)^t
  Spectrum spectrum;  ///< of `a`
  double b = 0.0;
  double delta = 0.0;
  std::vector<Index> sigma;
  Index step = 0;
  double phi = 0.0;

  SymMatrix gram;          ///< U U^t, fixed for the run
  Vector gram_projection;  ///< diagonal of Q^t (U U^t) Q in the current eigenbasis
  double op_norm_sq = 0.0;

  /// A_0 = 0, b_0 = eps |U|_HS^2 / |D|_HS^2, delta = eps/(1-eps) |U|^2 / |D|_HS^2.
  static LowerBarrierState start(const DenseMatrix& u, const DiagonalWeights& d, double eps);
  /// Appends column j with weight 1/alpha_j and moves the barrier to `next_barrier`.
  void advance(const DenseMatrix& u, const DiagonalWeights& d, Index j, double next_barrier);
};

/// Running state of the upper-barrier (norm-bound) selector.
struct UpperBarrierState {
  SymMatrix a;  ///< s * sum over sigma of (U e_j)(U e_j)^t
  Spectrum spectrum;
  double u = 0.0;
  double delta = 0.0;
  double s = 0.0;
  std::vector<Index> sigma;
  Index step = 0;
  double psi = 0.0;

  SymMatrix gram;
  Vector gram_projection;
  double op_norm_sq = 0.0;

  /// u_0 = eta m delta, alpha = |U|_HS^2 / u_0, s = (1 - lambda) m / (alpha + |U|^2 / delta).
  static UpperBarrierState start(const DenseMatrix& u, double lambda, double eta, double delta);
  void advance(const DenseMatrix& u, Index j);
};

struct RiFeasibility {
  double lhs = 0.0;  ///< (U e_j)^t (A - b' I)^{-2} U e_j
  double rhs = 0.0;  ///< (phi(A,b) - phi(A,b'))/|U|^2 * (-alpha_j^2 - (U e_j)^t (A - b' I)^{-1} U e_j)
  double margin = 0.0;
  bool feasible = false;
};

struct KtFeasibility {
  double f_value = 0.0;
  double threshold = 0.0;  ///< 1/s
  bool feasible = false;
};

/// k = max(1, floor((1-eps)^2 |U|_HS^2 / |U|^2)), capped at n.
Index ri_target_size(const DenseMatrix& u, double eps);

/// phi(A, b) = Tr(U^t (A - bI)^{-1} U).
double phi_potential(const DenseMatrix& u, const SymMatrix& a, double b);

/// Slack used by both feasibility tests: 1e-9 max(1, |U|_HS^2).
double feasibility_slack(double hs_norm_sq);

/// Per-column admissibility test for the next lower-barrier step (barrier b - delta).
RiFeasibility ri_feasible(const LowerBarrierState& state, const DenseMatrix& u, const DiagonalWeights& d, Index j);

/// Weighted restricted-invertibility selection.
SelectionCertificate ri_select(const DenseMatrix& u, const DiagonalWeights& d, double eps);

/// k = ceil(lambda m) for 1/m <= lambda < 1.
Index kt_target_size(Index m, double lambda);

/// psi(A, u) = Tr(U^t (uI - A)^{-1} U).
double psi_potential(const DenseMatrix& u, const SymMatrix& a, double barrier);

/// F_l(U e_j) against the threshold 1/s for the next upper-barrier step.
KtFeasibility kt_feasible(const UpperBarrierState& state, const DenseMatrix& u, Index j);

/// (1/sqrt(1-lambda)) (sqrt(lambda+eta)|U| + sqrt(1+lambda/eta)|U|_HS/sqrt(m)).
double kt_bound(double lambda, double eta, double op_norm, double hs_norm, Index m);

/// Norm-bounded column selection. `delta` is a free scale; the chosen sigma does not depend on it.
SelectionCertificate kt_select(const DenseMatrix& u, double lambda, std::optional<double> eta = std::nullopt,
                               double delta = 1.0);

} // namespace ripsel

namespace ripsel {

/// Raised when a selector cannot continue; carries the partial certificate and its trace.
class SelectionBreakdown : public NumericalError {
public:
  SelectionBreakdown(const std::string& what, SelectionCertificate partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  [[nodiscard]] const SelectionCertificate& partial() const noexcept { return partial_; }

private:
  SelectionCertificate partial_;
};

} // namespace ripsel
