#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "powsim/markov.hpp"
#include "powsim/trace.hpp"

namespace powsim::analytics {

// --- winner-of-the-race comparisons ----------------------------------------

enum class RaceWinner { Attacker, Rational, Tie };
enum class PoolRaceWinner { Pool, Authentic, Tie };

const char* to_string(RaceWinner w);
const char* to_string(PoolRaceWinner w);

/// Header-withholding race: the attacker keeps the slot iff
/// beta * alpha_v > (1 - beta) * (1 - alpha_v). Equality is reported as an
/// explicit tie. `alt_branch` swaps the second operand for
/// (1 - beta) * alpha_v, the variant implied by the miner-count reading.
RaceWinner race_winner_eq1(double beta, double alpha_v, bool alt_branch = false);

/// Same comparison with the paused miner's power removed from alpha_v.
RaceWinner race_winner_eq2(double beta, double alpha_v_minus_i, bool alt_branch = false);

/// Selfish race: straight power comparison between pool and authentic side.
PoolRaceWinner race_winner_eq3(double alpha_self, double alpha_auth);

/// Expected honest-miner loss: window-failure probability times honest power.
double loss_miners_eq4(double rho, double alpha_mv);

/// Expected attacker loss: window-failure probability times attacker power.
double loss_attacker_eq5(double z, double alpha_A);

// --- attack chains -----------------------------------------------------------

/// Three-state withholding-attack chain (idle / header out / race). When
/// `stopped_power` > 0 that much rational power sits out while the header is
/// outstanding. Transition probabilities are conditional on the next block
/// find under the exponential race model.
MarkovModel build_bdos_chain(double attacker_power,
                             double rational_power,
                             double beta,
                             double stopped_power = 0.0);

/// Four-state selfish-mining chain (idle / one ahead / race / two-or-more
/// ahead). The lead >= 2 regime is collapsed into one state whose exit rate
/// matches the embedded lead walk.
MarkovModel build_selfish_chain(double pool_power, double beta);

struct RevenueShares {
  double attacker = 0.0;
  double honest = 0.0;
};

/// Long-run main-chain revenue split implied by the withholding chain.
RevenueShares bdos_revenue_prediction(double attacker_power,
                                      double rational_power,
                                      double beta,
                                      double stopped_power = 0.0);

/// Long-run pool share of the main chain under selfish mining, from
/// first-step analysis of the idle-state renewal cycle. Requires
/// pool_power < 0.5 (the private lead walk must be recurrent).
double selfish_revenue_prediction(double pool_power, double beta);

// --- trace estimators ----------------------------------------------------------

/// Fraction of block-find steps spent in each attack-chain state.
std::vector<double> occupancy_from_trace(const SimTrace& trace);

/// Main-chain revenue share per miner index. Dummy blocks and genesis count
/// for no one. Throws EmptyChain when no full block sits on the main chain.
std::map<int, double> revenue_from_trace(const SimTrace& trace);

struct LossEstimate {
  double rho_hat = 0.0;               // windows with no honest full block / windows
  double z_hat = 0.0;                 // windows with no attacker full block / windows
  double loss_miners_hat = 0.0;       // rho_hat * alpha_mv
  double loss_attacker_hat = 0.0;     // z_hat * alpha_A
  double honest_waste_empirical = 0.0;    // per-window honest share of effort in honest-failure windows
  double attacker_waste_empirical = 0.0;  // per-window attacker share of effort in attacker-failure windows
  std::uint64_t windows = 0;
  std::uint64_t expired_windows = 0;
};

/// Window-failure frequencies and the matching measured wasted-work
/// fractions, all computed from one finished trace. Throws DefenseDisabled
/// when the trace carries no window log.
LossEstimate estimate_losses(const SimTrace& trace);

}  // namespace powsim::analytics
