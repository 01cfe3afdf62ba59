#pragma once

#include <cstdint>
#include <vector>

#include "powsim/rng.hpp"
#include "powsim/scenario.hpp"
#include "powsim/trace.hpp"

namespace powsim {

/// Power split across the two tips of an attack race: the attacker keeps its
/// own power on its tip and pulls `rushing` of the honest power over.
struct RacePartition {
  double attacker_side = 0.0;
  double honest_side = 0.0;
};

RacePartition make_race_partition(double attacker_power, double honest_power, double rushing);

/// Validating wrapper used when a race forms over concrete tips. The model
/// only ever races two tips; anything else is a signal, not a guess.
RacePartition resolve_race(const std::vector<BlockId>& tips,
                           double attacker_power,
                           double honest_power,
                           double rushing);

/// Runs one deterministic discrete-event simulation of the scenario until
/// `horizon_blocks` full blocks sit on the main chain (or no further
/// progress is possible). Identical scenarios produce identical traces.
SimTrace run(const Scenario& scenario);

}  // namespace powsim
