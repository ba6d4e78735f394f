// SPDX-License-Identifier: Apache-2.0
//
// Serial versus OpenMP sweep over a small F grid.
#include "cranmc/experiments.hpp"

#include <benchmark/benchmark.h>

namespace {

cranmc::SweepSpec spec(int workers) {
    cranmc::SweepSpec s;
    s.base = cranmc::default_scenario();
    s.param = cranmc::SweepParam::F;
    s.grid = {1000, 2000};
    s.methods = {cranmc::Method::parse("joint"), cranmc::Method::parse("separate:0.5")};
    s.seeds = {1, 2, 3, 4};
    s.workers = workers;
    return s;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto s = spec(1);
    for (auto _ : state) benchmark::DoNotOptimize(cranmc::run_sweep_serial(s));
}

void BM_SweepParallel(benchmark::State& state) {
    const auto s = spec(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cranmc::run_sweep(s));
}

void BM_SeparateSingle(benchmark::State& state) {
    const auto sc = cranmc::default_scenario();
    const auto m = cranmc::Method::parse("separate:0.5");
    for (auto _ : state) benchmark::DoNotOptimize(cranmc::run_single(sc, m, 1));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeparateSingle)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
