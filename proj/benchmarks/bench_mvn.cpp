#include <benchmark/benchmark.h>

#include <cmath>

#include "csd/event_prob.hpp"

using namespace csd;

static void BM_ExcursionProbability(benchmark::State& state) {
  FieldModel g = FieldModel::stationary_gaussian(2, CovarianceKernel::squared_exponential());
  SiteSet l_shape({Site{0, 0}, Site{1, 0}, Site{1, 1}});
  for (auto _ : state) {
    ProbEstimate e = excursion_probability(l_shape, 1.5, g, Connectivity::Nearest);
    benchmark::DoNotOptimize(e.value);
  }
}
BENCHMARK(BM_ExcursionProbability)->Unit(benchmark::kMillisecond);

static void BM_PeakDenominatorMoore(benchmark::State& state) {
  FieldModel g = FieldModel::stationary_gaussian(2, CovarianceKernel::squared_exponential());
  for (auto _ : state) {
    ProbEstimate e = peak_denominator(Site::origin(2), 1.5, g, Connectivity::Moore);
    benchmark::DoNotOptimize(e.value);
  }
}
BENCHMARK(BM_PeakDenominatorMoore)->Unit(benchmark::kMillisecond);
