#include <benchmark/benchmark.h>

#include "fasim/lasso.hpp"
#include "fasim/random.hpp"

namespace {

using namespace fasim;

void BM_LassoFit(benchmark::State& state) {
  const Index n = 200;
  const Index p = state.range(0);
  RandomStream rng(SeedSpec{1, 0});
  Matrix U(n, p);
  rng.fill_normal(U);
  Vector noise(n);
  rng.fill_normal(noise);
  const Vector y = U.leftCols(3).rowwise().sum() + noise;
  const double lambda = 0.1 * lambda_max(U, y);
  for (auto _ : state) benchmark::DoNotOptimize(lasso_fit(U, y, lambda).beta.data());
}
BENCHMARK(BM_LassoFit)->Arg(200)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
