#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ripsel/barrier.hpp"

namespace ripsel {

/// Independent re-verification of selection certificates. Everything here is recomputed
/// from the input matrices and sigma with the SVD routines in linalg; nothing from the
/// barrier selectors is reused.
struct VerificationClause {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SubsetOptimum {
  std::vector<Index> sigma;
  double value = 0.0;
};

struct VerificationReport {
  SelectionKind kind = SelectionKind::RestrictedInvertibility;
  std::vector<VerificationClause> clauses;
  double recomputed_achieved = 0.0;
  double recomputed_bound = 0.0;
  Index recomputed_target = 0;
  double slack = 0.0;  ///< multiplicative slack applied to the theorem comparison
  std::optional<SubsetOptimum> oracle;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] const VerificationClause* find(std::string_view name) const;
};

VerificationReport verify_ri(const DenseMatrix& u, const DiagonalWeights& d, const SelectionCertificate& cert);
VerificationReport verify_kt(const DenseMatrix& u, const SelectionCertificate& cert);

/// Largest enumeration the oracles accept.
inline constexpr Index kOracleMaxColumns = 12;

/// Exact maximizer of s_min(U_sigma D_sigma^{-1}) over size-k subsets of Gamma_D. m <= 12.
SubsetOptimum oracle_best_subset_smin(const DenseMatrix& u, const DiagonalWeights& d, Index k);

/// Exact minimizer of |U_sigma| over size-k subsets. m <= 12.
SubsetOptimum oracle_best_subset_norm(const DenseMatrix& u, Index k);

} // namespace ripsel
