#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "buslane/experiment.hpp"
#include "buslane/verify.hpp"

using namespace buslane;

namespace {

std::vector<RowInstance> instances(std::size_t k, std::size_t n) {
  std::mt19937_64 rng(k);
  std::vector<RowInstance> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_row_instance(rng, k));
  return out;
}

void BM_SolveBnb(benchmark::State& state) {
  const auto set = instances(static_cast<std::size_t>(state.range(0)), 32);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_bnb(set[i++ % set.size()]));
  }
}
BENCHMARK(BM_SolveBnb)->Arg(4)->Arg(8)->Arg(12)->Arg(16)->Arg(18)->Unit(benchmark::kMicrosecond);

void BM_SolveExhaustive(benchmark::State& state) {
  const auto set = instances(static_cast<std::size_t>(state.range(0)), 8);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_exhaustive(set[i++ % set.size()]));
  }
}
BENCHMARK(BM_SolveExhaustive)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_ComputeAtg(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<AtgCase> cases;
  for (int i = 0; i < 256; ++i) cases.push_back(random_atg_case(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    const AtgCase& c = cases[i++ % cases.size()];
    benchmark::DoNotOptimize(compute_atg(c.leader_td, c.follower_td, c.tau, c.signal, c.min_window));
  }
}
BENCHMARK(BM_ComputeAtg);

// Five simulated minutes per iteration at the given demand ratio.
void BM_Simulate(benchmark::State& state, StrategyKind kind) {
  Scenario s;
  s.demand.capacity_vph = 1800.0;
  s.demand.vc_ratio = static_cast<double>(state.range(0)) / 10.0;
  s.demand.sim_duration = 300.0;
  s.demand.warmup = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_single(s, kind, 1));
  }
  state.counters["ticks/s"] =
      benchmark::Counter(600.0 * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}
BENCHMARK_CAPTURE(BM_Simulate, ebl, StrategyKind::EBL)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Simulate, dstp, StrategyKind::DSTP)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
