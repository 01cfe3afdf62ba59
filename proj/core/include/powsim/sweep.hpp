#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "powsim/scenario.hpp"

namespace powsim {

/// One sweep dimension: a scenario override key and the values it takes.
struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

/// Parses "key=start:stop:step" (stop inclusive up to rounding).
SweepAxis parse_sweep_axis(const std::string& text);

struct SweepSpec {
  Scenario base;
  std::vector<SweepAxis> axes;
  int repetitions = 1;  // seed of repetition k is base seed + k
  int jobs = 0;         // 0: hardware concurrency
};

struct SweepRow {
  std::vector<double> coords;
  int rep = 0;
  std::uint64_t seed = 0;
  std::uint64_t full_blocks = 0;
  std::uint64_t dummy_blocks = 0;
  std::map<int, double> shares;
  double attacker_share = 0.0;
  bool has_losses = false;
  double rho_hat = 0.0;
  double z_hat = 0.0;
};

/// Runs the whole grid, one independent simulation per (point, repetition).
/// Jobs execute concurrently; the returned rows follow grid order (row-major
/// over the axes, repetitions innermost) regardless of scheduling.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

void write_sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows, std::ostream& os);

}  // namespace powsim
