#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "powsim/error.hpp"

namespace powsim {

/// Deterministic random source. mt19937_64 output is pinned by the
/// standard, and all variates are derived from raw 64-bit draws here rather
/// than through distribution objects, so identical seeds give identical
/// streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1), 53 bits of resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 gen_;
};

/// Time until a miner with the given power share finds its next block, for
/// a network-wide mean interval `mean_interval`. Memoryless by design:
/// restarting the draw on a tip switch is statistically a no-op.
inline double sample_interblock(double power, double mean_interval, Rng& rng) {
  if (power <= 0.0) {
    throw SimError(Err::NonPositivePower, "mining power must be positive");
  }
  if (mean_interval <= 0.0) {
    throw SimError(Err::InvalidScenario, "mean block interval must be positive");
  }
  return rng.exponential(mean_interval / power);
}

enum class RaceSide { A, B };

/// Plays one two-sided block race: each side finds its next block after an
/// exponential time proportional to its rate; the earlier find wins. A side
/// with zero rate never finds anything.
inline RaceSide sample_race_winner(double rate_a, double rate_b, Rng& rng) {
  if (rate_a < 0.0 || rate_b < 0.0) {
    throw SimError(Err::InvalidPowers, "race rates must be non-negative");
  }
  if (rate_a <= 0.0 && rate_b <= 0.0) {
    throw SimError(Err::InvalidPowers, "race with two idle sides never resolves");
  }
  if (rate_a <= 0.0) return RaceSide::B;
  if (rate_b <= 0.0) return RaceSide::A;
  double ta = rng.exponential(1.0 / rate_a);
  double tb = rng.exponential(1.0 / rate_b);
  return ta <= tb ? RaceSide::A : RaceSide::B;
}

}  // namespace powsim
