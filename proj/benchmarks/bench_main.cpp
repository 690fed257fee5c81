// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "ablab/cocycle.hpp"
#include "ablab/cube.hpp"
#include "ablab/density_of_states.hpp"
#include "ablab/green.hpp"
#include "ablab/parallel.hpp"
#include "ablab/pastur.hpp"
#include "ablab/rng.hpp"

using namespace ablab;

static void BM_ProductStreamed(benchmark::State& state) {
  const DisorderConfig cfg(1.0, 0.1);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(log_norm_streamed(cfg, n, 1, stream++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProductStreamed)->Arg(1 << 16)->Arg(1 << 20);

static void BM_Propagate(benchmark::State& state) {
  const DisorderConfig cfg(1.0, 0.1);
  const auto word = sample_word(static_cast<std::size_t>(state.range(0)), 1, 0);
  PropagateOptions opts;
  opts.store_orbit = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate(cfg, word, Direction(0), {1.0, 0.0}, opts).log_norm);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Propagate)->Arg(1 << 16);

static void BM_PhaseSum(benchmark::State& state) {
  const DisorderConfig cfg(1.0, 0.1);
  const auto word = sample_word(static_cast<std::size_t>(state.range(0)), 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(fp_lognorm(cfg, word));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PhaseSum)->Arg(1 << 16);

static void BM_TauExhaustive(benchmark::State& state) {
  set_thread_count(1);
  const DisorderConfig cfg(1.0, 0.25);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tau_level_mass(cfg, n, Direction(0), 0.25 / 8).worst_mass);
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_TauExhaustive)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_SturmCount(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(0));
  CounterRng rng(1, 0);
  std::vector<double> diag(l);
  for (double& d : diag) d = rng.below(2) ? 0.3 : -0.3;
  double e = -2.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sturm_count(diag, e));
    e = e > 2.3 ? -2.3 : e + 0.01;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SturmCount)->Arg(5000);

static void BM_BoxGreen(benchmark::State& state) {
  const DisorderConfig cfg(1.0, 0.1);
  const auto signs = green_box_signs(static_cast<std::uint64_t>(state.range(0)), 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(box_green(cfg, {1.0, 1e-6}, signs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(signs.size()));
}
BENCHMARK(BM_BoxGreen)->Arg(10'000);
BENCHMARK_MAIN();
