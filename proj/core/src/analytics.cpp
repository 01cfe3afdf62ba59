#include "powsim/analytics.hpp"

#include <algorithm>
#include <cmath>

namespace powsim::analytics {

namespace {

void check_unit(double v, const char* name) {
  if (v < 0.0 || v > 1.0) {
    throw SimError(Err::InvalidPowers, std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

const char* to_string(RaceWinner w) {
  switch (w) {
    case RaceWinner::Attacker: return "attacker";
    case RaceWinner::Rational: return "rational";
    case RaceWinner::Tie: return "tie";
  }
  return "unknown";
}

const char* to_string(PoolRaceWinner w) {
  switch (w) {
    case PoolRaceWinner::Pool: return "pool";
    case PoolRaceWinner::Authentic: return "authentic";
    case PoolRaceWinner::Tie: return "tie";
  }
  return "unknown";
}

RaceWinner race_winner_eq1(double beta, double alpha_v, bool alt_branch) {
  check_unit(beta, "beta");
  check_unit(alpha_v, "alpha_v");
  double attacker_side = beta * alpha_v;
  double rational_side = alt_branch ? (1.0 - beta) * alpha_v : (1.0 - beta) * (1.0 - alpha_v);
  if (attacker_side > rational_side) return RaceWinner::Attacker;
  if (rational_side > attacker_side) return RaceWinner::Rational;
  return RaceWinner::Tie;
}

RaceWinner race_winner_eq2(double beta, double alpha_v_minus_i, bool alt_branch) {
  return race_winner_eq1(beta, alpha_v_minus_i, alt_branch);
}

PoolRaceWinner race_winner_eq3(double alpha_self, double alpha_auth) {
  check_unit(alpha_self, "alpha_self");
  check_unit(alpha_auth, "alpha_auth");
  if (alpha_self > alpha_auth) return PoolRaceWinner::Pool;
  if (alpha_auth > alpha_self) return PoolRaceWinner::Authentic;
  return PoolRaceWinner::Tie;
}

double loss_miners_eq4(double rho, double alpha_mv) {
  check_unit(rho, "rho");
  check_unit(alpha_mv, "alpha_mv");
  return rho * alpha_mv;
}

double loss_attacker_eq5(double z, double alpha_A) {
  check_unit(z, "z");
  check_unit(alpha_A, "alpha_A");
  return z * alpha_A;
}

MarkovModel build_bdos_chain(double attacker_power,
                             double rational_power,
                             double beta,
                             double stopped_power) {
  check_unit(attacker_power, "attacker_power");
  check_unit(rational_power, "rational_power");
  check_unit(beta, "beta");
  check_unit(stopped_power, "stopped_power");
  if (std::fabs(attacker_power + rational_power - 1.0) > 1e-9) {
    throw SimError(Err::InvalidPowers, "attacker and rational power must sum to 1");
  }
  if (stopped_power > rational_power + 1e-12) {
    throw SimError(Err::InvalidPowers, "stopped power cannot exceed rational power");
  }

  double mining_rational = rational_power - stopped_power;  // still active with a header out
  double active1 = attacker_power + mining_rational;

  MarkovModel model;
  model.states = {"idle", "header_out", "race"};
  model.transitions = {
      {rational_power, attacker_power, 0.0},
      {0.0, 1.0, 0.0},  // placeholder, fixed below
      {1.0, 0.0, 0.0},
  };
  if (active1 > 0.0) {
    // A second attacker find cashes the previous body in and rolls the
    // attack forward; a rational find opens the race.
    model.transitions[1] = {0.0, attacker_power / active1, mining_rational / active1};
  }
  model.validate();
  return model;
}

MarkovModel build_selfish_chain(double pool_power, double beta) {
  check_unit(pool_power, "pool_power");
  check_unit(beta, "beta");
  double a = pool_power;
  // Exit rate of the collapsed lead>=2 state: an honest find leaves it only
  // when the lead is exactly two, which the embedded lead walk occupies with
  // probability (1 - a/(1-a)); the product collapses to 1 - 2a.
  double exit3 = std::clamp(1.0 - 2.0 * a, 0.0, 1.0);

  MarkovModel model;
  model.states = {"idle", "lead_one", "race", "lead_two_plus"};
  model.transitions = {
      {1.0 - a, a, 0.0, 0.0},
      {0.0, 0.0, 1.0 - a, a},
      {1.0, 0.0, 0.0, 0.0},
      {exit3, 0.0, 0.0, 1.0 - exit3},
  };
  model.validate();
  return model;
}

RevenueShares bdos_revenue_prediction(double attacker_power,
                                      double rational_power,
                                      double beta,
                                      double stopped_power) {
  MarkovModel model = build_bdos_chain(attacker_power, rational_power, beta, stopped_power);
  std::vector<double> pi = stationary(model);

  double mining_rational = rational_power - stopped_power;
  double active1 = attacker_power + mining_rational;
  double p_repeat = active1 > 0.0 ? attacker_power / active1 : 0.0;

  // Race slots: the attacker keeps its own tip, `beta` of the rational power
  // is rushed onto it, the rest defends the rival block.
  double attacker_blocks = pi[1] * p_repeat * 1.0 +
                           pi[2] * (attacker_power * 2.0 + beta * rational_power * 1.0);
  double honest_blocks = pi[0] * rational_power * 1.0 +
                         pi[2] * (beta * rational_power * 1.0 +
                                  (1.0 - beta) * rational_power * 2.0);
  double total = attacker_blocks + honest_blocks;
  if (total <= 0.0) return RevenueShares{0.0, 0.0};
  return RevenueShares{attacker_blocks / total, honest_blocks / total};
}

double selfish_revenue_prediction(double pool_power, double beta) {
  check_unit(pool_power, "pool_power");
  check_unit(beta, "beta");
  double a = pool_power;
  if (a >= 0.5) {
    throw SimError(Err::InvalidPowers,
                   "pool power must be below 0.5 for a stationary revenue prediction");
  }
  if (a == 0.0) return 0.0;

  // Renewal cycle from the idle state:
  //   honest find            (1-a): one honest block
  //   pool find, honest race a(1-a): pool self-extends (+2), rushed honest
  //                                  lands on the pool tip (+1/+1), or the
  //                                  honest side keeps both (+2 honest)
  //   pool find twice        a^2:   the pool rides the lead walk and cashes
  //                                  the whole branch, orphaning the honest
  //                                  blocks mined meanwhile
  double expected_extra = a / (1.0 - 2.0 * a);  // extra pool blocks in the lead walk
  double pool_blocks = a * (1.0 - a) * (2.0 * a + beta * (1.0 - a)) +
                       a * a * (2.0 + expected_extra);
  double honest_blocks = (1.0 - a) +
                         a * (1.0 - a) *
                             (beta * (1.0 - a) + 2.0 * (1.0 - beta) * (1.0 - a));
  return pool_blocks / (pool_blocks + honest_blocks);
}

std::vector<double> occupancy_from_trace(const SimTrace& trace) {
  if (trace.chain_states == 0) {
    throw SimError(Err::InvalidScenario, "trace has no attacking miner, no chain occupancy");
  }
  if (trace.total_steps == 0) {
    throw SimError(Err::EmptyChain, "trace recorded no block-find steps");
  }
  std::vector<double> occ(static_cast<std::size_t>(trace.chain_states), 0.0);
  for (std::size_t i = 0; i < occ.size(); ++i) {
    occ[i] = static_cast<double>(trace.state_steps[i]) / static_cast<double>(trace.total_steps);
  }
  return occ;
}

std::map<int, double> revenue_from_trace(const SimTrace& trace) {
  std::map<int, std::uint64_t> counts;
  for (const MinerStats& m : trace.miners) counts[m.id.value] = 0;
  std::uint64_t total = 0;
  for (BlockId id : trace.main_path()) {
    const Block& b = trace.tree.at(id);
    if (b.is_genesis() || b.kind != BlockKind::Full || b.miner.is_system()) continue;
    counts[b.miner.value]++;
    total++;
  }
  if (total == 0) {
    throw SimError(Err::EmptyChain, "main chain carries no full blocks beyond genesis");
  }
  std::map<int, double> shares;
  for (const auto& [miner, n] : counts) {
    shares[miner] = static_cast<double>(n) / static_cast<double>(total);
  }
  return shares;
}

LossEstimate estimate_losses(const SimTrace& trace) {
  if (!trace.scenario.defense.enabled || trace.windows.empty()) {
    throw SimError(Err::DefenseDisabled, "loss estimation needs a defense-enabled trace");
  }
  LossEstimate est;
  double honest_waste = 0.0;
  double attacker_waste = 0.0;
  std::uint64_t honest_fail = 0;
  std::uint64_t attacker_fail = 0;
  for (const WindowRecord& w : trace.windows) {
    if (w.outcome == WindowOutcome::RunEnd) continue;  // truncated window
    est.windows++;
    if (w.outcome == WindowOutcome::Expired) est.expired_windows++;
    bool no_honest = w.outcome != WindowOutcome::HonestBlock;
    bool no_attacker = w.outcome != WindowOutcome::AttackerBlock;
    if (no_honest) {
      honest_fail++;
      if (w.total_effort > 0.0) honest_waste += w.honest_effort / w.total_effort;
    }
    if (no_attacker) {
      attacker_fail++;
      if (w.total_effort > 0.0) attacker_waste += w.attacker_effort / w.total_effort;
    }
  }
  if (est.windows == 0) {
    throw SimError(Err::DefenseDisabled, "trace closed no complete defense window");
  }
  double n = static_cast<double>(est.windows);
  est.rho_hat = static_cast<double>(honest_fail) / n;
  est.z_hat = static_cast<double>(attacker_fail) / n;
  double alpha_a = trace.scenario.attacker_power();
  double alpha_mv = trace.scenario.honest_power();
  est.loss_miners_hat = loss_miners_eq4(est.rho_hat, alpha_mv);
  est.loss_attacker_hat = loss_attacker_eq5(est.z_hat, alpha_a);
  est.honest_waste_empirical = honest_waste / n;
  est.attacker_waste_empirical = attacker_waste / n;
  return est;
}

}  // namespace powsim::analytics
