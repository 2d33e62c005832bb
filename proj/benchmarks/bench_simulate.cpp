#include <benchmark/benchmark.h>

#include "csd/fields.hpp"

using namespace csd;

static void BM_SimulateGauss1D(benchmark::State& state) {
  Window w = Window::centered(std::vector<int64_t>{state.range(0)});
  FieldSimulator sim(FieldModel::stationary_gaussian(1, CovarianceKernel::squared_exponential()),
                     w, 7);
  uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim.generate(i++).values.data());
  state.SetItemsProcessed(state.iterations() * w.site_count());
}
BENCHMARK(BM_SimulateGauss1D)->Arg(1500);

static void BM_SimulateGauss2D(benchmark::State& state) {
  auto side = state.range(0);
  Window w = Window::centered(std::vector<int64_t>{side, side});
  FieldSimulator sim(FieldModel::stationary_gaussian(2, CovarianceKernel::squared_exponential()),
                     w, 7);
  uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim.generate(i++).values.data());
  state.SetItemsProcessed(state.iterations() * w.site_count());
}
BENCHMARK(BM_SimulateGauss2D)->Arg(100)->Arg(300);
