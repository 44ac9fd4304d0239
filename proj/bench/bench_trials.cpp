// Serial against OpenMP-parallel trial loops on the same workloads.
//
//   ./bench_trials --benchmark_filter=Haar

#include <benchmark/benchmark.h>

#include "matsing/ensembles.hpp"
#include "matsing/random.hpp"
#include "matsing/trials.hpp"
#include "matsing/verify.hpp"

using namespace matsing;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel x" + std::to_string(thread_count()));
}

void BM_HaarSampling(benchmark::State& state) {
  const auto size = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const auto traces = map_trials(
        256,
        [&](std::int64_t t) {
          RngStream rng(1, static_cast<std::uint64_t>(t));
          return sample_haar_unitary(size, rng).trace();
        },
        mode(state));
    benchmark::DoNotOptimize(traces.data());
  }
  state.SetItemsProcessed(state.iterations() * 256);
  label(state);
}

void BM_TruncatedUnitaryPoints(benchmark::State& state) {
  const auto N = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const auto configs = map_trials(
        256,
        [&](std::int64_t t) {
          RngStream rng(2, static_cast<std::uint64_t>(t));
          return truncated_unitary_points(N, 2, rng);
        },
        mode(state));
    benchmark::DoNotOptimize(configs.data());
  }
  state.SetItemsProcessed(state.iterations() * 256);
  label(state);
}

void BM_F0MomentDriver(benchmark::State& state) {
  DriverOptions opts;
  opts.trials = 2000;
  opts.seed = 3;
  opts.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(f0_moment_test(16, 2, opts).statistic);
  state.SetItemsProcessed(state.iterations() * opts.trials);
  label(state);
}

}  // namespace

BENCHMARK(BM_HaarSampling)->ArgsProduct({{0, 1}, {32, 128}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TruncatedUnitaryPoints)->ArgsProduct({{0, 1}, {16, 64}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_F0MomentDriver)->Args({0})->Args({1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
