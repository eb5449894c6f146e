#include <benchmark/benchmark.h>

#include <numbers>

#include "antikz/evolve.hpp"
#include "antikz/noise.hpp"
#include "antikz/sweep.hpp"

namespace {

using namespace antikz;

void BM_ApplyStep(benchmark::State& state) {
  QubitState s;
  const PauliCoefficients c{0.7, -1.3};
  for (auto _ : state) {
    for (int i = 0; i < 1000; ++i) apply_step(s, c, 1e-3);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ApplyStep);

// One noisy trajectory of a single mode; items = integration steps.
void BM_PropagateMode(benchmark::State& state) {
  const auto p = make_protocol(Protocol::Transverse, 20.0);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const double dt = p.tau / static_cast<double>(n);
  const auto noise = sample_realization({5e-4, dt, n, StreamKey{}}, 1);
  const double k = std::numbers::pi / 2;
  const auto g = prepare_ground_state(p, k);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(g, p, k, noise, {dt, false}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PropagateMode)->Arg(1 << 12)->Arg(1 << 16);

void BM_SampleNoise(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> buf(n);
  std::uint64_t r = 0;
  for (auto _ : state) {
    sample_into({1.0, 1e-3, n, StreamKey{0, 0, 0, 0, r++}}, 7, buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleNoise)->Arg(1 << 16);

void BM_Periodogram(benchmark::State& state) {
  const auto r = sample_realization({1.0, 1e-3, static_cast<std::size_t>(state.range(0)), StreamKey{}}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(psd_estimate(r));
}
BENCHMARK(BM_Periodogram)->Arg(1 << 14)->Arg(1 << 18);

// Full mode cell as run by the sweep: 10 realizations at tau = 10.
void BM_RunModeCell(benchmark::State& state) {
  const auto p = make_protocol(Protocol::Gapless, 10.0);
  const double k = 1.0;
  const std::size_t n = StepPolicy{}.steps_for(p.tau, plan_max_gap(p, k_grid(50)));
  for (auto _ : state) benchmark::DoNotOptimize(run_mode(p, k, 5e-4, 10, 0, StreamKey{}, n));
}
BENCHMARK(BM_RunModeCell)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
