#include <cmath>

#include "doctest.h"
#include "ripsel/certify.hpp"
#include "ripsel/generate.hpp"

using namespace ripsel;

namespace {

bool clause_passes(const VerificationReport& rep, std::string_view name) {
  const VerificationClause* c = rep.find(name);
  return c != nullptr && c->pass;
}

} // namespace

TEST_CASE("verify_ri accepts the identity run") {
  const DenseMatrix id(Matrix::Identity(4, 4));
  const DiagonalWeights w = DiagonalWeights::identity(4);
  const VerificationReport rep = verify_ri(id, w, ri_select(id, w, 0.5));
  CHECK(rep.passed());
  CHECK(rep.recomputed_achieved == doctest::Approx(1.0));
  CHECK(rep.recomputed_bound == doctest::Approx(0.5));
}

TEST_CASE("verify_ri flags a dropped index on the size clause") {
  const DenseMatrix id(Matrix::Identity(4, 4));
  const DiagonalWeights w = DiagonalWeights::identity(4);
  SelectionCertificate cert = ri_select(id, w, 0.1);
  REQUIRE(cert.sigma.size() == 3);
  cert.sigma.pop_back();
  const VerificationReport rep = verify_ri(id, w, cert);
  CHECK_FALSE(rep.passed());
  CHECK_FALSE(clause_passes(rep, "size"));
}

TEST_CASE("verify_ri flags out-of-range, repeated and unsupported indices") {
  const DenseMatrix u = gaussian_matrix(8, 60, 1);
  const DiagonalWeights w = DiagonalWeights::identity(60);
  const SelectionCertificate good = ri_select(u, w, 0.1);
  SelectionCertificate bad = good;
  bad.sigma.back() = 60;
  CHECK_FALSE(clause_passes(verify_ri(u, w, bad), "indices-in-range"));
  bad = good;
  REQUIRE(bad.sigma.size() >= 2);
  bad.sigma[1] = bad.sigma[0];
  CHECK_FALSE(clause_passes(verify_ri(u, w, bad), "indices-distinct"));

  Matrix m = u.values();
  m.col(good.sigma[0]).setZero();
  Vector a = Vector::Ones(60);
  a(good.sigma[0]) = 0.0;
  CHECK_FALSE(clause_passes(verify_ri(DenseMatrix(m), DiagonalWeights(a), good), "support"));
}

TEST_CASE("verify_ri flags tampered values and kind") {
  const DenseMatrix u = gaussian_matrix(5, 12, 2);
  const DiagonalWeights w = random_positive_weights(12, 3);
  SelectionCertificate cert = ri_select(u, w, 0.3);
  CHECK(verify_ri(u, w, cert).passed());
  SelectionCertificate t = cert;
  t.claimed_bound *= 1.01;
  CHECK_FALSE(clause_passes(verify_ri(u, w, t), "bound-formula"));
  t = cert;
  t.achieved *= 1.01;
  CHECK_FALSE(clause_passes(verify_ri(u, w, t), "achieved-matches"));
  t = cert;
  t.kind = SelectionKind::NormBound;
  CHECK_FALSE(clause_passes(verify_ri(u, w, t), "kind"));
  t = cert;
  t.params.epsilon = 1.5;
  CHECK_FALSE(clause_passes(verify_ri(u, w, t), "parameter-range"));
}

TEST_CASE("verify_ri passes on seeded Gaussian runs") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const DenseMatrix u = gaussian_matrix(6, 24, seed);
    const DiagonalWeights w = seed % 2 ? DiagonalWeights::identity(24) : random_positive_weights(24, seed + 1);
    const VerificationReport rep = verify_ri(u, w, ri_select(u, w, 0.2 + 0.02 * static_cast<double>(seed % 10)));
    CHECK(rep.passed());
  }
}

TEST_CASE("verify_kt identity, bound formula and tampering") {
  const DenseMatrix id(Matrix::Identity(4, 4));
  const SelectionCertificate cert = kt_select(id, 0.5);
  VerificationReport rep = verify_kt(id, cert);
  CHECK(rep.passed());
  CHECK(clause_passes(rep, "particular-bound"));

  const DenseMatrix u = gaussian_matrix(5, 20, 8);
  const SelectionCertificate g = kt_select(u, 0.25, 0.5);
  rep = verify_kt(u, g);
  CHECK(rep.passed());
  CHECK(rep.find("particular-bound") == nullptr);
  const double direct = (std::sqrt(0.75) * operator_norm(u) + std::sqrt(1.5) * hs_norm(u) / std::sqrt(20.0)) / std::sqrt(0.75);
  CHECK(std::abs(rep.recomputed_bound - direct) <= 1e-12 * direct);
  CHECK(std::abs(g.claimed_bound - direct) <= 1e-12 * direct);

  SelectionCertificate t = g;
  t.claimed_bound *= 0.5;
  CHECK_FALSE(verify_kt(u, t).passed());
  CHECK_FALSE(clause_passes(verify_kt(u, t), "bound-formula"));
  t = g;
  t.sigma.pop_back();
  CHECK_FALSE(clause_passes(verify_kt(u, t), "size"));
}

TEST_CASE("verifiers reject an empty sigma") {
  const DenseMatrix id(Matrix::Identity(3, 3));
  SelectionCertificate cert = ri_select(id, DiagonalWeights::identity(3), 0.3);
  cert.sigma.clear();
  CHECK_FALSE(verify_ri(id, DiagonalWeights::identity(3), cert).passed());
}

TEST_CASE("oracle_best_subset_smin examples") {
  const DenseMatrix id(Matrix::Identity(4, 4));
  CHECK(oracle_best_subset_smin(id, DiagonalWeights::identity(4), 2).value == doctest::Approx(1.0));

  Matrix u(2, 3);
  u << 1, 0, 1 / std::sqrt(2.0), 0, 1, 1 / std::sqrt(2.0);
  const SubsetOptimum best = oracle_best_subset_smin(DenseMatrix(u), DiagonalWeights::identity(3), 2);
  CHECK(best.sigma == std::vector<Index>{0, 1});
  CHECK(best.value == doctest::Approx(1.0));
}

TEST_CASE("oracle_best_subset_norm examples") {
  CHECK(oracle_best_subset_norm(DenseMatrix(Matrix::Identity(6, 6)), 3).value == doctest::Approx(1.0));
  Matrix u = Matrix::Zero(2, 3);
  u(0, 0) = u(0, 1) = u(1, 2) = 1.0;
  const SubsetOptimum best = oracle_best_subset_norm(DenseMatrix(u), 2);
  CHECK(best.value == doctest::Approx(1.0));
  CHECK((best.sigma == std::vector<Index>{0, 2} || best.sigma == std::vector<Index>{1, 2}));
}

TEST_CASE("oracles refuse large or malformed problems") {
  const DenseMatrix big = gaussian_matrix(3, 13, 1);
  CHECK_THROWS_WITH_AS(oracle_best_subset_norm(big, 2), "oracle refuses m > 12 (combinatorial blowup)", InvalidInput);
  CHECK_THROWS_AS(oracle_best_subset_smin(big, DiagonalWeights::identity(13), 2), InvalidInput);
  const DenseMatrix small = gaussian_matrix(3, 5, 1);
  CHECK_THROWS_AS(oracle_best_subset_norm(small, 0), InvalidInput);
  CHECK_THROWS_AS(oracle_best_subset_smin(small, DiagonalWeights::identity(5), 6), InvalidInput);
}

TEST_CASE("oracle sandwich on small instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix u = gaussian_matrix(4, 10, 900 + seed);
    const DiagonalWeights w = DiagonalWeights::identity(10);
    const SelectionCertificate ri = ri_select(u, w, 0.3);
    const SubsetOptimum best = oracle_best_subset_smin(u, w, static_cast<Index>(ri.sigma.size()));
    CHECK(ri.achieved <= best.value + 1e-12);
    CHECK(ri.achieved >= (1 - 1e-6) * ri.claimed_bound);

    const SelectionCertificate kt = kt_select(u, 0.3);
    const SubsetOptimum low = oracle_best_subset_norm(u, static_cast<Index>(kt.sigma.size()));
    CHECK(low.value <= kt.achieved + 1e-12);
    CHECK(kt.achieved <= (1 + 1e-6) * kt.claimed_bound);
  }
}
