#include <benchmark/benchmark.h>

#include "fasim/fast.hpp"
#include "fasim/random.hpp"

namespace {

using namespace fasim;

void BM_MultiplierBootstrap(benchmark::State& state) {
  const Index n = 200;
  const Index p = state.range(0);
  const Index B = state.range(1);
  RandomStream rng(SeedSpec{4, 0});
  Matrix W(n, p);
  rng.fill_normal(W);
  for (auto _ : state) {
    benchmark::DoNotOptimize(multiplier_bootstrap(W, B, 0.05, SeedSpec{5, 0}).critical_value);
  }
}
BENCHMARK(BM_MultiplierBootstrap)
    ->Args({200, 500})
    ->Args({500, 500})
    ->Args({500, 2000})
    ->Unit(benchmark::kMillisecond);

void BM_MHat(benchmark::State& state) {
  const Index n = state.range(0);
  const Index p = 500;
  RandomStream rng(SeedSpec{6, 0});
  FactorDecomposition fd;
  fd.U_hat.resize(n, p);
  rng.fill_normal(fd.U_hat);
  fd.F_hat = Matrix::Zero(n, 0);
  fd.B_hat = Matrix::Zero(p, 0);
  Vector Y(n);
  rng.fill_normal(Y);
  for (auto _ : state) benchmark::DoNotOptimize(m_hat_matrix(fd, Y).data());
}
BENCHMARK(BM_MHat)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
