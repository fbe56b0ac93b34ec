#include <benchmark/benchmark.h>

#include "ripsel/ripsel.hpp"

namespace {

using namespace ripsel;

void BM_RiSelect(benchmark::State& state) {
  const Index n = state.range(0);
  const DenseMatrix u = gaussian_matrix(n, 4 * n, 1);
  const DiagonalWeights d = DiagonalWeights::identity(4 * n);
  for (auto _ : state) benchmark::DoNotOptimize(ri_select(u, d, 0.2));
}
BENCHMARK(BM_RiSelect)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_KtSelect(benchmark::State& state) {
  const Index n = state.range(0);
  const DenseMatrix u = gaussian_matrix(n, 4 * n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kt_select(u, 0.25));
}
BENCHMARK(BM_KtSelect)->Arg(8)->Arg(16)->Arg(32);

void BM_Mvee(benchmark::State& state) {
  const Index n = state.range(0);
  const PointSet ps = random_symmetric_body(n, 5 * n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(mvee(ps));
}
BENCHMARK(BM_Mvee)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_CubeBasis(benchmark::State& state) {
  const Index n = state.range(0);
  const PointSet ps = random_symmetric_body(n, 3 * n, 4);
  const JohnDecomposition d = whiten_decomposition(mvee(ps), ps);
  for (auto _ : state) benchmark::DoNotOptimize(cube_basis(d));
}
BENCHMARK(BM_CubeBasis)->Arg(8)->Arg(16)->Arg(32);

} // namespace

BENCHMARK_MAIN();
