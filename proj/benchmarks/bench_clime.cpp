#include <benchmark/benchmark.h>

#include "fasim/precision.hpp"
#include "fasim/random.hpp"

namespace {

using namespace fasim;

void BM_ClimeColumn(benchmark::State& state) {
  const Index n = 200;
  const Index p = state.range(0);
  RandomStream rng(SeedSpec{2, 0});
  Matrix U(n, p);
  rng.fill_normal(U);
  const Matrix S = sample_cov_u(U);
  const double delta = 0.85 * default_delta(n, p) / 2.0;
  Index j = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(clime_column(S, j, delta).data());
    j = (j + 1) % p;
  }
}
BENCHMARK(BM_ClimeColumn)->Arg(200)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_Clime(benchmark::State& state) {
  const Index n = 200;
  const Index p = state.range(0);
  RandomStream rng(SeedSpec{3, 0});
  Matrix U(n, p);
  rng.fill_normal(U);
  const Matrix S = sample_cov_u(U);
  for (auto _ : state) benchmark::DoNotOptimize(clime(S, default_delta(n, p)).Theta.data());
}
BENCHMARK(BM_Clime)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
