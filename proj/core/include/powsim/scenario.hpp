#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powsim/block.hpp"

namespace powsim {

enum class StrategyKind { Honest, Rational, Bdos, Selfish };

const char* to_string(StrategyKind kind);
StrategyKind strategy_from_string(const std::string& name);

struct MinerSpec {
  MinerId id;
  double power = 0.0;  // fraction of total network hash rate
  StrategyKind strategy = StrategyKind::Honest;
};

/// Decision knobs for rational miners facing a withheld-body header.
struct RationalPolicy {
  bool stop_when_header_seen = false;
  double min_win_probability = 0.0;
};

struct DefenseConfig {
  bool enabled = false;
  double window_multiplier = 1.0;

  double window_seconds(double mean_interval, double propagation_delay) const {
    return (mean_interval + propagation_delay) * window_multiplier;
  }
};

/// Complete experiment description. A (Scenario, seed) pair fully determines
/// the simulation output.
struct Scenario {
  std::vector<MinerSpec> miners;
  double mean_block_interval = 600.0;  // network mean seconds per block
  double propagation_delay = 0.0;      // fixed publish-to-acceptance delay
  double rushing = 0.0;                // fraction of honest power landing on the attacker tip in a race
  DefenseConfig defense;
  std::uint64_t horizon_blocks = 1000;  // full blocks on the main chain before stopping
  std::uint64_t seed = 1;
  RationalPolicy rational_policy;
  bool attacker_retires_after_halt = false;  // withholding attacker stops once every rational miner paused
  bool selfish_stubborn = false;             // pool keeps withholding even when the defense is active
  bool grace_inflight = false;               // accept (as orphans) late blocks created before the dummy
  std::uint64_t max_events = 0;              // 0: derived from the horizon

  /// Throws InvalidScenario when an invariant is violated; the message names
  /// the failed invariant.
  void validate() const;

  double defense_window() const {
    return defense.window_seconds(mean_block_interval, propagation_delay);
  }

  std::optional<std::size_t> attacker_index() const;
  double attacker_power() const;
  double honest_power() const;  // everything that is not the attacker
  std::uint64_t event_budget() const;
};

}  // namespace powsim
