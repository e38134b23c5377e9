#include <benchmark/benchmark.h>

#include "axda/bounds.hpp"

using namespace axda;

static void BM_LogParabolicCylinder(benchmark::State& state) {
  double d = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_parabolic_cylinder(d, 0.37));
  }
}
BENCHMARK(BM_LogParabolicCylinder)->Arg(1)->Arg(100)->Arg(10000)->Arg(1000000);

static void BM_TvBoundLipschitz(benchmark::State& state) {
  LipschitzBlock b{1.0, 1e-2};
  double d = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tv_bound_lipschitz(std::span(&b, 1), d));
  }
}
BENCHMARK(BM_TvBoundLipschitz)->Arg(10)->Arg(1000000);

static void BM_TvBoundSmoothConvex(benchmark::State& state) {
  RegularityProfile rp;
  rp.dim = 100;
  rp.grad_lipschitz = 1.0;
  rp.grad_second_moment = 1.0;
  rp.convex = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tv_bound_smooth_convex(rp, 1e-2));
  }
}
BENCHMARK(BM_TvBoundSmoothConvex);

static void BM_CoverageInterval(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(coverage_interval(1.0, 1.0, 1e-2, 0.05));
  }
}
BENCHMARK(BM_CoverageInterval);

BENCHMARK_MAIN();
