#include <benchmark/benchmark.h>

#include "csd/shapes.hpp"

using namespace csd;

static void BM_EnumerateRooted(benchmark::State& state) {
  int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto shapes = enumerate_rooted(k, Connectivity::Nearest, 2);
    benchmark::DoNotOptimize(shapes.size());
  }
}
BENCHMARK(BM_EnumerateRooted)->Arg(6)->Arg(8)->Arg(10);

static void BM_GroupByRigidMotion(benchmark::State& state) {
  auto shapes = enumerate_rooted(static_cast<int>(state.range(0)), Connectivity::Nearest, 2);
  for (auto _ : state) {
    auto classes = group_by_rigid_motion(shapes);
    benchmark::DoNotOptimize(classes.size());
  }
}
BENCHMARK(BM_GroupByRigidMotion)->Arg(5)->Arg(6);
