#include <benchmark/benchmark.h>

#include "csd/fields.hpp"
#include "csd/lattice.hpp"

using namespace csd;

static void BM_LabelClusters(benchmark::State& state) {
  auto side = state.range(0);
  Window w = Window::centered(std::vector<int64_t>{side, side});
  Realization r = simulate(FieldModel::white_noise(2), w, 1);
  ExcursionMask mask = ExcursionMask::from_values(w, r.values, 0.5);
  for (auto _ : state) {
    Labeling lab = label_clusters(mask, Connectivity::Nearest);
    benchmark::DoNotOptimize(lab.clusters.size());
  }
  state.SetItemsProcessed(state.iterations() * w.site_count());
}
BENCHMARK(BM_LabelClusters)->Arg(100)->Arg(300);

static void BM_LocalMaxima(benchmark::State& state) {
  auto side = state.range(0);
  Window w = Window::centered(std::vector<int64_t>{side, side});
  Realization r = simulate(FieldModel::white_noise(2), w, 2);
  for (auto _ : state) {
    LocalMaxima lm = local_maxima(w, r.values, 0.5, Connectivity::Moore);
    benchmark::DoNotOptimize(lm.indices.size());
  }
  state.SetItemsProcessed(state.iterations() * w.site_count());
}
BENCHMARK(BM_LocalMaxima)->Arg(300);
