#include "doctest.h"

#include "powsim/analytics.hpp"

using namespace powsim;
using namespace powsim::analytics;

TEST_CASE("header race winner: the rushing limits") {
  CHECK(race_winner_eq1(1.0, 0.6) == RaceWinner::Attacker);   // 0.6 > 0
  CHECK(race_winner_eq1(0.0, 0.6) == RaceWinner::Rational);   // 0 < 0.4
  CHECK(race_winner_eq1(0.5, 0.5) == RaceWinner::Tie);        // 0.25 = 0.25
}

TEST_CASE("header race winner with the paused miner removed") {
  CHECK(race_winner_eq2(1.0, 0.4) == RaceWinner::Attacker);
  CHECK(race_winner_eq2(0.0, 0.4) == RaceWinner::Rational);
  // 0.4 * 0.5 = 0.2 against 0.6 * 0.5 = 0.3
  CHECK(race_winner_eq2(0.4, 0.5) == RaceWinner::Rational);
}

TEST_CASE("both header-race forms share one functional shape") {
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      double beta = i / 100.0;
      double alpha = j / 100.0;
      CHECK(race_winner_eq1(beta, alpha) == race_winner_eq2(beta, alpha));
    }
  }
}

TEST_CASE("the alternative second branch changes the verdict off the diagonal") {
  // As written at (0.6, 0.3): 0.18 vs 0.28 -> Rational. The alternative
  // branch weighs the same honest power on both sides: 0.18 vs 0.12.
  CHECK(race_winner_eq1(0.6, 0.3) == RaceWinner::Rational);
  CHECK(race_winner_eq1(0.6, 0.3, true) == RaceWinner::Attacker);
  CHECK(race_winner_eq1(0.4, 0.5, true) == RaceWinner::Rational);  // 0.2 vs 0.3
}

TEST_CASE("selfish race winner is a strict power comparison") {
  CHECK(race_winner_eq3(0.4, 0.6) == PoolRaceWinner::Authentic);
  CHECK(race_winner_eq3(0.6, 0.4) == PoolRaceWinner::Pool);
  CHECK(race_winner_eq3(0.5, 0.5) == PoolRaceWinner::Tie);
}

TEST_CASE("selfish race winner is antisymmetric") {
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      double a = i / 100.0;
      double b = j / 100.0;
      PoolRaceWinner fwd = race_winner_eq3(a, b);
      PoolRaceWinner rev = race_winner_eq3(b, a);
      if (fwd == PoolRaceWinner::Pool) CHECK(rev == PoolRaceWinner::Authentic);
      if (fwd == PoolRaceWinner::Authentic) CHECK(rev == PoolRaceWinner::Pool);
      if (fwd == PoolRaceWinner::Tie) CHECK(rev == PoolRaceWinner::Tie);
    }
  }
}

TEST_CASE("loss formulas are plain products") {
  CHECK(loss_miners_eq4(0.0, 0.7) == 0.0);
  CHECK(loss_miners_eq4(1.0, 0.7) == doctest::Approx(0.7));
  CHECK(loss_miners_eq4(0.3, 0.5) == doctest::Approx(0.15));
  CHECK(loss_attacker_eq5(0.0, 0.3) == 0.0);
  CHECK(loss_attacker_eq5(1.0, 0.3) == doctest::Approx(0.3));
  CHECK(loss_attacker_eq5(0.5, 0.2) == doctest::Approx(0.1));
  CHECK_THROWS_AS(loss_miners_eq4(1.5, 0.5), SimError);
}

TEST_CASE("withholding chain: an all-powerful attacker never leaves the attack cycle") {
  MarkovModel m = build_bdos_chain(1.0, 0.0, 0.5);
  auto pi = stationary(m);
  CHECK(pi[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(pi[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pi[2] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("withholding chain: a powerless attacker never leaves the idle state") {
  MarkovModel m = build_bdos_chain(0.0, 1.0, 0.5);
  auto pi = stationary(m);
  CHECK(pi[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("withholding chain: hand-solved occupancy at 0.3 attacker power") {
  MarkovModel m = build_bdos_chain(0.3, 0.7, 0.5);
  auto pi = stationary(m);
  CHECK(pi[0] == doctest::Approx(70.0 / 121.0).epsilon(1e-9));
  CHECK(pi[1] == doctest::Approx(30.0 / 121.0).epsilon(1e-9));
  CHECK(pi[2] == doctest::Approx(21.0 / 121.0).epsilon(1e-9));
}

TEST_CASE("withholding chain respects the paused-power variant") {
  MarkovModel m = build_bdos_chain(0.3, 0.7, 0.5, 0.7);
  // No rational power mining while a header is out: the attack repeats.
  CHECK(m.transitions[1][1] == doctest::Approx(1.0));
  CHECK(m.transitions[1][2] == doctest::Approx(0.0));
  CHECK_THROWS_AS(build_bdos_chain(0.3, 0.7, 0.5, 0.8), SimError);
  CHECK_THROWS_AS(build_bdos_chain(0.4, 0.7, 0.5), SimError);
}

TEST_CASE("withholding revenue at (0.3, 0.5) matches the hand computation") {
  RevenueShares s = bdos_revenue_prediction(0.3, 0.7, 0.5);
  CHECK(s.attacker == doctest::Approx(0.2895).epsilon(1e-9));
  CHECK(s.honest == doctest::Approx(0.7105).epsilon(1e-9));
}

TEST_CASE("selfish chain: degenerate powers") {
  auto pi0 = stationary(build_selfish_chain(0.0, 0.0));
  CHECK(pi0[0] == doctest::Approx(1.0).epsilon(1e-9));

  // Full pool power: the race state is unreachable, the lead walk absorbs.
  MarkovModel full = build_selfish_chain(1.0, 0.0);
  CHECK(full.transitions[1][2] == doctest::Approx(0.0));
  auto pi1 = stationary(full);
  CHECK(pi1[3] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pi1[2] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("selfish chain: transition structure at 0.4") {
  MarkovModel m = build_selfish_chain(0.4, 0.0);
  CHECK(m.transitions[0][0] == doctest::Approx(0.6));
  CHECK(m.transitions[0][1] == doctest::Approx(0.4));
  CHECK(m.transitions[1][2] == doctest::Approx(0.6));
  CHECK(m.transitions[1][3] == doctest::Approx(0.4));
  CHECK(m.transitions[2][0] == doctest::Approx(1.0));
  CHECK(m.transitions[3][0] == doctest::Approx(0.2));
  CHECK(m.transitions[3][3] == doctest::Approx(0.8));

  auto pi = stationary(m);
  // pi = (1, a, a(1-a), a^2/(1-2a)) / norm at a = 0.4.
  double norm = 1.0 + 0.4 + 0.24 + 0.8;
  CHECK(pi[0] == doctest::Approx(1.0 / norm).epsilon(1e-9));
  CHECK(pi[1] == doctest::Approx(0.4 / norm).epsilon(1e-9));
  CHECK(pi[2] == doctest::Approx(0.24 / norm).epsilon(1e-9));
  CHECK(pi[3] == doctest::Approx(0.8 / norm).epsilon(1e-9));
}

TEST_CASE("selfish revenue prediction: frozen value and edge cases") {
  // Cycle bookkeeping at (0.4, 0): pool 0.832 vs honest 0.888 per cycle.
  CHECK(selfish_revenue_prediction(0.4, 0.0) == doctest::Approx(0.832 / 1.72).epsilon(1e-12));
  CHECK(selfish_revenue_prediction(0.0, 0.5) == 0.0);
  CHECK(selfish_revenue_prediction(0.4, 0.0) > 0.42);
  CHECK_THROWS_AS(selfish_revenue_prediction(0.5, 0.0), SimError);
  // Rushing can only help the pool.
  CHECK(selfish_revenue_prediction(0.4, 0.5) > selfish_revenue_prediction(0.4, 0.0));
}

// ---------------------------------------------------------------------------
// Trace estimators (driven through small engine runs)
// ---------------------------------------------------------------------------

#include "powsim/engine.hpp"

namespace {

Scenario estimator_scenario(bool defense, double window_multiplier, std::uint64_t horizon) {
  Scenario s;
  s.miners = {{MinerId::of(0), 0.7, StrategyKind::Honest},
              {MinerId::of(1), 0.3, StrategyKind::Honest}};
  s.mean_block_interval = 600.0;
  s.defense.enabled = defense;
  s.defense.window_multiplier = window_multiplier;
  s.horizon_blocks = horizon;
  s.seed = 29;
  return s;
}

}  // namespace

TEST_CASE("a lone miner owns the whole main chain") {
  Scenario s;
  s.miners = {{MinerId::of(0), 1.0, StrategyKind::Honest}};
  s.horizon_blocks = 100;
  s.seed = 2;
  auto shares = revenue_from_trace(run(s));
  CHECK(shares[0] == doctest::Approx(1.0));
}

TEST_CASE("a chain of nothing but dummies has no revenue to split") {
  SimTrace trace;
  trace.scenario = estimator_scenario(true, 1.0, 1);
  Block d;
  d.id = 1;
  d.parent = 0;
  d.miner = MinerId::system();
  d.kind = BlockKind::Dummy;
  d.created_at = 600.0;
  d.published_at = 600.0;
  trace.tree.append(d);
  trace.final_tip = 1;
  trace.miners = {{MinerId::of(0), 0.7, StrategyKind::Honest, 0, 0, 0},
                  {MinerId::of(1), 0.3, StrategyKind::Honest, 0, 0, 0}};
  CHECK_THROWS_AS(revenue_from_trace(trace), SimError);
}

TEST_CASE("estimate_losses needs an enabled defense") {
  SimTrace trace = run(estimator_scenario(false, 1.0, 500));
  CHECK_THROWS_AS(estimate_losses(trace), SimError);
}

TEST_CASE("a generous window almost never expires on honest miners") {
  SimTrace trace = run(estimator_scenario(true, 20.0, 2000));
  LossEstimate est = estimate_losses(trace);
  CHECK(est.rho_hat < 0.01);
  CHECK(est.loss_miners_hat < 0.01);
}

TEST_CASE("a vanishing window expires before almost every block") {
  SimTrace trace = run(estimator_scenario(true, 0.05, 300));
  LossEstimate est = estimate_losses(trace);
  CHECK(est.rho_hat > 0.9);
}
