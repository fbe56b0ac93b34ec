#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "ripsel/barrier.hpp"
#include "ripsel/generate.hpp"

using namespace ripsel;

namespace {

Matrix columns(std::initializer_list<Vector> cols) {
  Matrix out(cols.begin()->size(), static_cast<Index>(cols.size()));
  Index j = 0;
  for (const Vector& c : cols) out.col(j++) = c;
  return out;
}

Vector unit(Index n, Index i) { return Vector::Unit(n, i); }

bool trace_monotone(const SelectionCertificate& cert) {
  for (const StepRecord& r : cert.trace) {
    if (r.potential_after > r.potential_before + 1e-9 * std::max(1.0, std::abs(r.potential_before))) return false;
  }
  return true;
}

} // namespace

TEST_CASE("ri_target_size examples") {
  const DenseMatrix id(Matrix::Identity(4, 4));
  CHECK(ri_target_size(id, 0.5) == 1);
  CHECK(ri_target_size(id, 0.1) == 3);
  const DenseMatrix dup(columns({unit(2, 0), unit(2, 0), unit(2, 1), unit(2, 1)}));
  CHECK(operator_norm(dup) * operator_norm(dup) == doctest::Approx(2.0));
  CHECK(ri_target_size(dup, 0.25) == 1);
}

TEST_CASE("ri_target_size errors") {
  CHECK_THROWS_AS(ri_target_size(DenseMatrix(Matrix::Zero(2, 2)), 0.5), InvalidInput);
  CHECK_THROWS_WITH(ri_target_size(DenseMatrix(Matrix::Identity(2, 2)), 1.5), "eps must lie in (0,1)");
  CHECK_THROWS_WITH(ri_target_size(DenseMatrix(Matrix::Identity(2, 2)), 0.0), "eps must lie in (0,1)");
}

TEST_CASE("phi_potential examples") {
  const DenseMatrix g = gaussian_matrix(3, 5, 8);
  const double hs = hs_norm(g);
  CHECK(phi_potential(g, SymMatrix(3), 0.9) == doctest::Approx(-hs * hs / 0.9));

  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 3.0;
  CHECK(phi_potential(DenseMatrix(Matrix::Identity(2, 2)), SymMatrix::from_lower(a), 1.0) == doctest::Approx(-0.5));

  const SymMatrix s = SymMatrix::gram(gaussian_matrix(3, 2, 9).values());
  const double base = phi_potential(g, s, 0.4);
  CHECK(phi_potential(DenseMatrix(2.5 * g.values()), s, 0.4) == doctest::Approx(6.25 * base));
  CHECK(base == doctest::Approx(oracle::trace_potential(g.values(), s.values(), 0.4)).epsilon(1e-10));
}

TEST_CASE("ri_feasible first step is symmetric on the identity") {
  const Index n = 5;
  const DenseMatrix id(Matrix::Identity(n, n));
  const DiagonalWeights w = DiagonalWeights::identity(n);
  const LowerBarrierState st = LowerBarrierState::start(id, w, 0.5);
  const RiFeasibility f0 = ri_feasible(st, id, w, 0);
  for (Index j = 1; j < n; ++j) {
    const RiFeasibility f = ri_feasible(st, id, w, j);
    CHECK(f.margin == doctest::Approx(f0.margin).epsilon(1e-14));
    CHECK(f.feasible);
  }
}

TEST_CASE("ri_feasible matches the brute-force step condition on a 2x3 instance") {
  const Vector diag = (unit(2, 0) + unit(2, 1)) / std::sqrt(2.0);
  const DenseMatrix u(columns({unit(2, 0), unit(2, 1), diag}));
  const DiagonalWeights w = DiagonalWeights::identity(3);
  const LowerBarrierState st = LowerBarrierState::start(u, w, 0.4);
  for (Index j = 0; j < 3; ++j) {
    const RiFeasibility f = ri_feasible(st, u, w, j);
    const oracle::Condition5 c =
        oracle::lower_step_condition(u.values(), w.alphas(), Matrix::Zero(2, 2), st.b, st.delta, j, true);
    CHECK(f.lhs == doctest::Approx(c.lhs).epsilon(1e-12));
    CHECK(f.rhs == doctest::Approx(c.rhs).epsilon(1e-12));
  }
}

TEST_CASE("ri_feasible matches explicit inverses mid-run") {
  const DenseMatrix u = gaussian_matrix(8, 60, 31);
  const DiagonalWeights w = random_positive_weights(60, 32);
  const double eps = 0.1;
  LowerBarrierState st = LowerBarrierState::start(u, w, eps);
  const SelectionCertificate cert = ri_select(u, w, eps);
  REQUIRE(cert.sigma.size() >= 2);
  st.advance(u, w, cert.sigma[0], st.b - st.delta);
  st.advance(u, w, cert.sigma[1], st.b - st.delta);
  for (Index j = 0; j < 60; ++j) {
    if (j == cert.sigma[0] || j == cert.sigma[1]) continue;
    const RiFeasibility f = ri_feasible(st, u, w, j);
    const oracle::Condition5 c = oracle::lower_step_condition(u.values(), w.alphas(), st.a.values(), st.b, st.delta, j);
    CHECK(f.lhs == doctest::Approx(c.lhs).epsilon(1e-8));
    CHECK(f.rhs == doctest::Approx(c.rhs).epsilon(1e-8));
  }
}

TEST_CASE("ri_feasible aggregate existence at every step") {
  const DenseMatrix u = gaussian_matrix(8, 32, 2);
  const DiagonalWeights w = DiagonalWeights::identity(32);
  const double eps = 0.3;
  const SelectionCertificate cert = ri_select(u, w, eps);
  LowerBarrierState st = LowerBarrierState::start(u, w, eps);
  const double tau = feasibility_slack(hs_norm(u) * hs_norm(u));
  for (Index chosen : cert.sigma) {
    double total = 0.0;
    for (Index j = 0; j < 32; ++j) {
      if (std::find(st.sigma.begin(), st.sigma.end(), j) != st.sigma.end()) continue;
      total += ri_feasible(st, u, w, j).margin;
    }
    CHECK(total >= -tau * 32);
    st.advance(u, w, chosen, st.b - st.delta);
  }
}

TEST_CASE("ri_feasible rejects columns outside the support") {
  Matrix m = Matrix::Identity(3, 3);
  m(2, 2) = 0.0;
  Vector a = Vector::Ones(3);
  a(2) = 0.0;
  const DenseMatrix u(m);
  const DiagonalWeights w(a);
  const LowerBarrierState st = LowerBarrierState::start(u, w, 0.2);
  CHECK_THROWS_AS(ri_feasible(st, u, w, 2), InvalidInput);
}

TEST_CASE("ri_select on the identity") {
  const DenseMatrix id(Matrix::Identity(4, 4));
  const SelectionCertificate cert = ri_select(id, DiagonalWeights::identity(4), 0.5);
  CHECK(cert.sigma.size() == 1);
  CHECK(cert.achieved == doctest::Approx(1.0));
  CHECK(cert.claimed_bound == doctest::Approx(0.5));
  CHECK(cert.kind == SelectionKind::RestrictedInvertibility);
}

TEST_CASE("ri_select with column-norm weights achieves eps") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix u = gaussian_matrix(8, 30, seed);
    const DiagonalWeights w = DiagonalWeights::column_norms(u);
    for (double eps : {0.2, 0.5}) {
      const SelectionCertificate cert = ri_select(u, w, eps);
      CHECK(cert.claimed_bound == doctest::Approx(eps));
      CHECK(cert.achieved >= (1 - 1e-6) * eps);
    }
  }
}

TEST_CASE("ri_select on seeded Gaussian 8x32 against an SVD of the selection") {
  const DenseMatrix u = gaussian_matrix(8, 32, 1234);
  const double eps = 0.3;
  const SelectionCertificate cert = ri_select(u, DiagonalWeights::identity(32), eps);
  CHECK(static_cast<Index>(cert.sigma.size()) == ri_target_size(u, eps));
  const Matrix sel = u.select_columns(cert.sigma);
  const double smin = oracle::smin_via_gram(sel);
  CHECK(cert.achieved == doctest::Approx(smin).epsilon(1e-8));
  CHECK(smin >= (1 - 1e-6) * eps * hs_norm(u) / std::sqrt(32.0));
  CHECK(cert.claimed_bound == doctest::Approx(eps * hs_norm(u) / std::sqrt(32.0)));
  CHECK(trace_monotone(cert));
  CHECK(cert.params.final_barrier >= (1 - 1e-9) * eps * eps * hs_norm(u) * hs_norm(u) / 32.0);
  CHECK(cert.warnings.empty());
}

TEST_CASE("ri_select trace shape") {
  const DenseMatrix u = gaussian_matrix(10, 40, 5);
  const DiagonalWeights w = random_positive_weights(40, 6);
  const SelectionCertificate cert = ri_select(u, w, 0.25);
  REQUIRE(cert.trace.size() == cert.sigma.size());
  for (std::size_t i = 0; i < cert.trace.size(); ++i) {
    const StepRecord& r = cert.trace[i];
    CHECK(r.chosen_index == cert.sigma[i]);
    CHECK(r.barrier_after == doctest::Approx(r.barrier_before - cert.params.delta));
    CHECK(r.barrier_after > 0.0);
    CHECK(r.spectral_edge > r.barrier_after);
    if (i > 0) CHECK(r.barrier_before == cert.trace[i - 1].barrier_after);
  }
  std::vector<Index> sorted = cert.sigma;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("ri_select clamped target takes one step to the final barrier") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseMatrix u = gaussian_matrix(16, 64, seed);
    const DiagonalWeights w = DiagonalWeights::identity(64);
    const double eps = 0.8;
    const SelectionCertificate cert = ri_select(u, w, eps);
    const double hs_sq = hs_norm(u) * hs_norm(u);
    CHECK(cert.params.clamped);
    CHECK(cert.sigma.size() == 1);
    CHECK(trace_monotone(cert));
    CHECK(cert.params.final_barrier >= (1 - 1e-9) * eps * eps * hs_sq / 64.0);
    CHECK(cert.achieved >= (1 - 1e-6) * cert.claimed_bound);
  }
}

TEST_CASE("ri_select honors the weight support") {
  Matrix m = gaussian_matrix(4, 8, 3).values();
  Vector a = Vector::Ones(8);
  for (Index j : {1, 4, 6}) {
    m.col(j).setZero();
    a(j) = 0.0;
  }
  const SelectionCertificate cert = ri_select(DenseMatrix(m), DiagonalWeights(a), 0.2);
  for (Index j : cert.sigma) CHECK(a(j) != 0.0);
}

TEST_CASE("ri_select errors") {
  const DenseMatrix id(Matrix::Identity(3, 3));
  CHECK_THROWS_WITH_AS(ri_select(id, DiagonalWeights::identity(3), 1.5), "eps must lie in (0,1)", InvalidInput);
  Vector a = Vector::Ones(3);
  a(0) = 0.0;
  CHECK_THROWS_WITH_AS(ri_select(id, DiagonalWeights(a), 0.5), doctest::Contains("1"), InvalidInput);
  CHECK_THROWS_AS(ri_select(id, DiagonalWeights::identity(4), 0.5), InvalidInput);
}

TEST_CASE("ri_select is bitwise deterministic") {
  const DenseMatrix u = gaussian_matrix(9, 27, 71);
  const DiagonalWeights w = random_positive_weights(27, 72);
  const SelectionCertificate a = ri_select(u, w, 0.35);
  const SelectionCertificate b = ri_select(u, w, 0.35);
  CHECK(a.sigma == b.sigma);
  CHECK(a.achieved == b.achieved);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].potential_after == b.trace[i].potential_after);
    CHECK(a.trace[i].feasibility_margin == b.trace[i].feasibility_margin);
  }
}

TEST_CASE("kt_target_size examples and errors") {
  CHECK(kt_target_size(4, 0.5) == 2);
  CHECK(kt_target_size(10, 0.25) == 3);
  CHECK(kt_target_size(7, 1.0 / 7.0) == 1);
  CHECK_THROWS_WITH_AS(kt_target_size(10, 0.05), "lambda must lie in [1/m, 1)", InvalidInput);
  CHECK_THROWS_AS(kt_target_size(10, 1.0), InvalidInput);
}

TEST_CASE("kt_bound examples") {
  CHECK(kt_bound(0.5, 0.5, 1.0, 2.0, 4) == doctest::Approx(2.0 * (std::sqrt(0.5) + 1.0)));
  CHECK(kt_bound(0.5, 0.5, 1.0, 2.0, 4) == doctest::Approx(3.41421).epsilon(1e-5));
  CHECK(kt_bound(0.25, 0.25, 1.0, 1.0, 1) == doctest::Approx(2.44949).epsilon(1e-5));
}

TEST_CASE("kt_feasible is symmetric on the identity at the start") {
  const DenseMatrix id(Matrix::Identity(6, 6));
  const UpperBarrierState st = UpperBarrierState::start(id, 0.5, 0.5, 1.0);
  const double f0 = kt_feasible(st, id, 0).f_value;
  for (Index j = 1; j < 6; ++j) CHECK(kt_feasible(st, id, j).f_value == doctest::Approx(f0).epsilon(1e-14));
}

TEST_CASE("kt_feasible matches explicit inverses on a 3x6 instance") {
  const DenseMatrix u = gaussian_matrix(3, 6, 17);
  UpperBarrierState st = UpperBarrierState::start(u, 0.5, 0.5, 1.0);
  for (Index j = 0; j < 6; ++j) {
    const double f = kt_feasible(st, u, j).f_value;
    CHECK(f == doctest::Approx(oracle::upper_step_value(u.values(), Matrix::Zero(3, 3), st.u, st.delta, j))
                   .epsilon(1e-10));
  }
  st.advance(u, 2);
  for (Index j : {0, 1, 3, 4, 5}) {
    const double f = kt_feasible(st, u, j).f_value;
    CHECK(f == doctest::Approx(oracle::upper_step_value(u.values(), st.a.values(), st.u, st.delta, j)).epsilon(1e-9));
  }
}

TEST_CASE("kt_feasible averaging bound holds along a run") {
  const DenseMatrix u = gaussian_matrix(6, 24, 40);
  const SelectionCertificate cert = kt_select(u, 0.5);
  for (const StepRecord& r : cert.trace) CHECK(r.aggregate_margin >= -1e-9 * std::max(1.0, hs_norm(u) * hs_norm(u)));
}

TEST_CASE("kt_select on the identity") {
  const DenseMatrix id(Matrix::Identity(4, 4));
  const SelectionCertificate cert = kt_select(id, 0.5);
  CHECK(cert.sigma.size() == 2);
  CHECK(cert.achieved == doctest::Approx(1.0));
  CHECK(cert.claimed_bound == doctest::Approx(3.41421).epsilon(1e-5));
  REQUIRE(cert.params.particular_bound.has_value());
  CHECK(*cert.params.particular_bound == doctest::Approx(cert.claimed_bound));
}

TEST_CASE("kt_select seeded 6x24 with delta invariance") {
  const DenseMatrix u = gaussian_matrix(6, 24, 99);
  const SelectionCertificate one = kt_select(u, 0.25, std::nullopt, 1.0);
  const SelectionCertificate half = kt_select(u, 0.25, std::nullopt, 0.5);
  const SelectionCertificate two = kt_select(u, 0.25, std::nullopt, 2.0);
  CHECK(one.sigma.size() == 6);
  CHECK(one.sigma == half.sigma);
  CHECK(one.sigma == two.sigma);
  CHECK(operator_norm(u.select_columns(one.sigma)) <= one.claimed_bound);
  CHECK(one.achieved == doctest::Approx(singular_values(u.select_columns(one.sigma))(0)).epsilon(1e-10));
}

TEST_CASE("kt_select traces keep the spectrum under the barrier") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix u = gaussian_matrix(5, 20, seed);
    for (double lambda : {0.1, 0.5, 0.75}) {
      for (std::optional<double> eta : {std::optional<double>{}, std::optional<double>{0.9}}) {
        const SelectionCertificate cert = kt_select(u, lambda, eta);
        CHECK(static_cast<Index>(cert.sigma.size()) == kt_target_size(20, lambda));
        CHECK(trace_monotone(cert));
        for (const StepRecord& r : cert.trace) CHECK(r.spectral_edge < r.barrier_after);
        CHECK(cert.achieved <= (1 + 1e-6) * cert.claimed_bound);
        CHECK(cert.params.particular_bound.has_value() == !eta.has_value());
      }
    }
  }
}

TEST_CASE("kt_select errors") {
  const DenseMatrix id(Matrix::Identity(4, 4));
  CHECK_THROWS_WITH(kt_select(id, 0.1), "lambda must lie in [1/m, 1)");
  CHECK_THROWS_WITH(kt_select(id, 0.5, 0.4), "eta must lie in [lambda, 1)");
  CHECK_THROWS_WITH(kt_select(id, 0.5, 1.0), "eta must lie in [lambda, 1)");
  CHECK_THROWS_AS(kt_select(id, 0.5, std::nullopt, -1.0), InvalidInput);
  CHECK_THROWS_AS(kt_select(DenseMatrix(Matrix::Zero(2, 4)), 0.5), InvalidInput);
}

TEST_CASE("kt_select is bitwise deterministic") {
  const DenseMatrix u = gaussian_matrix(7, 21, 3);
  const SelectionCertificate a = kt_select(u, 0.3);
  const SelectionCertificate b = kt_select(u, 0.3);
  CHECK(a.sigma == b.sigma);
  CHECK(a.achieved == b.achieved);
  CHECK(a.claimed_bound == b.claimed_bound);
}

TEST_CASE("selection kind strings round trip") {
  CHECK(selection_kind_from_string(to_string(SelectionKind::NormBound)) == SelectionKind::NormBound);
  CHECK(to_string(SelectionKind::RestrictedInvertibility) == "restricted-invertibility");
  CHECK_THROWS_AS(selection_kind_from_string("bogus"), InvalidInput);
}
