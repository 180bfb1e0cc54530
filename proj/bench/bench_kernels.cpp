#include <benchmark/benchmark.h>

#include "fbent/feedback.hpp"
#include "fbent/parametric.hpp"

namespace {

void BM_SweepParallel(benchmark::State& state) {
  const auto grid = fbent::linspace(0.001, 0.099, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fbent::sweep_chi(1, 5, grid));
}

void BM_SweepSerial(benchmark::State& state) {
  const auto grid = fbent::linspace(0.001, 0.099, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fbent::sweep_chi_serial(1, 5, grid));
}

void BM_BoundBatchParallel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(fbent::bound_check_batch(1, static_cast<std::size_t>(state.range(0)), 4));
}

void BM_BoundBatchSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(fbent::bound_check_batch_serial(1, static_cast<std::size_t>(state.range(0)), 4));
}

}  // namespace

BENCHMARK(BM_SweepParallel)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoundBatchParallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoundBatchSerial)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
