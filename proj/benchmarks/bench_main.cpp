#include <benchmark/benchmark.h>

#include "powsim/analytics.hpp"
#include "powsim/engine.hpp"
#include "powsim/rng.hpp"

namespace {

powsim::Scenario honest3(std::uint64_t horizon) {
  powsim::Scenario s;
  s.miners = {{powsim::MinerId::of(0), 0.6, powsim::StrategyKind::Honest},
              {powsim::MinerId::of(1), 0.3, powsim::StrategyKind::Honest},
              {powsim::MinerId::of(2), 0.1, powsim::StrategyKind::Honest}};
  s.horizon_blocks = horizon;
  s.seed = 1;
  return s;
}

void BM_HonestRun(benchmark::State& state) {
  powsim::Scenario s = honest3(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) {
    powsim::SimTrace trace = powsim::run(s);
    benchmark::DoNotOptimize(trace.full_blocks_on_main);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HonestRun)->Arg(1000)->Arg(10000);

void BM_SelfishRun(benchmark::State& state) {
  powsim::Scenario s = honest3(static_cast<std::uint64_t>(state.range(0)));
  s.miners[0].strategy = powsim::StrategyKind::Selfish;
  s.miners[0].power = 0.4;
  s.miners[1].power = 0.35;
  s.miners[2].power = 0.25;
  for (auto _ : state) {
    powsim::SimTrace trace = powsim::run(s);
    benchmark::DoNotOptimize(trace.full_blocks_on_main);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelfishRun)->Arg(1000)->Arg(10000);

void BM_BdosDefenseRun(benchmark::State& state) {
  powsim::Scenario s = honest3(static_cast<std::uint64_t>(state.range(0)));
  s.miners[0].strategy = powsim::StrategyKind::Bdos;
  s.miners[0].power = 0.3;
  s.miners[1].strategy = powsim::StrategyKind::Rational;
  s.miners[1].power = 0.35;
  s.miners[2].strategy = powsim::StrategyKind::Rational;
  s.miners[2].power = 0.35;
  s.rushing = 0.5;
  s.defense.enabled = true;
  for (auto _ : state) {
    powsim::SimTrace trace = powsim::run(s);
    benchmark::DoNotOptimize(trace.dummy_blocks);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BdosDefenseRun)->Arg(1000)->Arg(10000);

void BM_Stationary(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  powsim::Rng rng(7);
  powsim::MarkovModel m;
  for (std::size_t i = 0; i < n; ++i) {
    m.states.push_back("s" + std::to_string(i));
    std::vector<double> row(n);
    double sum = 0.0;
    for (auto& v : row) {
      v = 0.01 + rng.uniform01();
      sum += v;
    }
    for (auto& v : row) v /= sum;
    m.transitions.push_back(row);
  }
  for (auto _ : state) {
    auto pi = powsim::stationary(m);
    benchmark::DoNotOptimize(pi.data());
  }
}
BENCHMARK(BM_Stationary)->Arg(4)->Arg(16)->Arg(64);

void BM_RaceSampler(benchmark::State& state) {
  powsim::Rng rng(9);
  int wins = 0;
  for (auto _ : state) {
    wins += powsim::sample_race_winner(0.65, 0.35, rng) == powsim::RaceSide::A;
  }
  benchmark::DoNotOptimize(wins);
}
BENCHMARK(BM_RaceSampler);

}  // namespace

BENCHMARK_MAIN();
