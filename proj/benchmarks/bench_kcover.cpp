#include <benchmark/benchmark.h>

#include "kcover/coverage.hpp"
#include "kcover/env.hpp"
#include "kcover/greedy.hpp"
#include "kcover/visibility.hpp"

namespace {

using namespace kcover;

Environment bench_city(int n) {
  GridSpec spec{n, n, 1.0, 1.0};
  CityGenParams params;
  params.n_rect_range = {n / 4, n / 2};
  params.rect_w_range = {3, 9};
  params.rect_h_range = {3, 9};
  return generate_random_city(spec, params, 7);
}

void occlusion_exact(benchmark::State& state) {
  const Environment env = bench_city(static_cast<int>(state.range(0)));
  const SensorPose sensor{{env.nx() / 2, env.ny() / 2}, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(occlusion_field_exact(env, sensor));
  }
}
BENCHMARK(occlusion_exact)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void occlusion_sweep(benchmark::State& state) {
  const Environment env = bench_city(static_cast<int>(state.range(0)));
  const SensorPose sensor{{env.nx() / 2, env.ny() / 2}, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(occlusion_field_sweep(env, sensor));
  }
}
BENCHMARK(occlusion_sweep)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

// One greedy step: every street candidate's gain against a 3-deep stack.
void gain_field_step(benchmark::State& state) {
  const Environment env = bench_city(static_cast<int>(state.range(0)));
  const CellMask candidates = candidate_mask(env, CandidatePolicy::streets);
  PsiStack stack(env.nx(), env.ny(), 3, env.z_max());
  stack.insert_field(occlusion_field_sweep(env, {{0, 0}, 0.0}));
  const Weights weights = Weights::halving(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gain_field(env, stack, weights, candidates, VisibilityMethod::sweep, 0));
  }
}
BENCHMARK(gain_field_step)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void gain_single(benchmark::State& state) {
  const Environment env = bench_city(64);
  PsiStack stack(env.nx(), env.ny(), 3, env.z_max());
  stack.insert_field(occlusion_field_sweep(env, {{0, 0}, 0.0}));
  const Weights weights = Weights::halving(3);
  const OcclusionField field = occlusion_field_sweep(env, {{32, 32}, 0.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(gain(stack, env, weights, field));
  }
}
BENCHMARK(gain_single)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
