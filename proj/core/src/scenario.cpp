#include "powsim/scenario.hpp"

#include <cmath>

namespace powsim {

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Honest: return "honest";
    case StrategyKind::Rational: return "rational";
    case StrategyKind::Bdos: return "bdos";
    case StrategyKind::Selfish: return "selfish";
  }
  return "unknown";
}

StrategyKind strategy_from_string(const std::string& name) {
  if (name == "honest") return StrategyKind::Honest;
  if (name == "rational") return StrategyKind::Rational;
  if (name == "bdos") return StrategyKind::Bdos;
  if (name == "selfish") return StrategyKind::Selfish;
  throw SimError(Err::InvalidScenario, "unknown strategy \"" + name + "\"");
}

void Scenario::validate() const {
  if (miners.empty()) {
    throw SimError(Err::InvalidScenario, "scenario must list at least one miner");
  }
  double sum = 0.0;
  int attackers = 0;
  for (std::size_t i = 0; i < miners.size(); ++i) {
    const MinerSpec& m = miners[i];
    if (m.id.value != static_cast<int>(i)) {
      throw SimError(Err::InvalidScenario, "miner ids must be dense 0..n-1");
    }
    if (m.power < 0.0) {
      throw SimError(Err::InvalidScenario, "miner powers must be non-negative");
    }
    if (m.strategy == StrategyKind::Bdos || m.strategy == StrategyKind::Selfish) ++attackers;
    sum += m.power;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw SimError(Err::InvalidScenario,
                   "miner powers must sum to 1 (got " + std::to_string(sum) + ")");
  }
  if (attackers > 1) {
    throw SimError(Err::InvalidScenario, "at most one attacking miner is supported");
  }
  if (mean_block_interval <= 0.0) {
    throw SimError(Err::InvalidScenario, "r (mean block interval) must be > 0");
  }
  if (propagation_delay < 0.0) {
    throw SimError(Err::InvalidScenario, "e_bar (propagation delay) must be >= 0");
  }
  if (rushing < 0.0 || rushing > 1.0) {
    throw SimError(Err::InvalidScenario, "beta (rushing) must lie in [0, 1]");
  }
  if (defense.window_multiplier <= 0.0) {
    throw SimError(Err::InvalidScenario, "defense window multiplier must be > 0");
  }
  if (horizon_blocks == 0) {
    throw SimError(Err::InvalidScenario, "horizon_blocks must be >= 1");
  }
  if (rational_policy.min_win_probability < 0.0 || rational_policy.min_win_probability > 1.0) {
    throw SimError(Err::InvalidScenario, "min_win_probability must lie in [0, 1]");
  }
}

std::optional<std::size_t> Scenario::attacker_index() const {
  for (std::size_t i = 0; i < miners.size(); ++i) {
    if (miners[i].strategy == StrategyKind::Bdos || miners[i].strategy == StrategyKind::Selfish) {
      return i;
    }
  }
  return std::nullopt;
}

double Scenario::attacker_power() const {
  auto idx = attacker_index();
  return idx ? miners[*idx].power : 0.0;
}

double Scenario::honest_power() const { return 1.0 - attacker_power(); }

std::uint64_t Scenario::event_budget() const {
  if (max_events != 0) return max_events;
  // Generous: an honest run needs a handful of events per finalized block.
  return 400 * horizon_blocks + 1'000'000;
}

}  // namespace powsim
