#include "doctest.h"

#include <set>

#include "powsim/analytics.hpp"
#include "powsim/engine.hpp"
#include "powsim/io.hpp"

using namespace powsim;

namespace {

Scenario honest_scenario(std::vector<double> powers, std::uint64_t horizon, std::uint64_t seed) {
  Scenario s;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    s.miners.push_back({MinerId::of(static_cast<int>(i)), powers[i], StrategyKind::Honest});
  }
  s.mean_block_interval = 600.0;
  s.horizon_blocks = horizon;
  s.seed = seed;
  return s;
}

Scenario selfish_scenario(double alpha, double beta, std::uint64_t horizon, std::uint64_t seed) {
  Scenario s;
  s.miners.push_back({MinerId::of(0), alpha, StrategyKind::Selfish});
  s.miners.push_back({MinerId::of(1), (1.0 - alpha) * 0.6, StrategyKind::Honest});
  s.miners.push_back({MinerId::of(2), (1.0 - alpha) * 0.4, StrategyKind::Honest});
  s.mean_block_interval = 600.0;
  s.rushing = beta;
  s.horizon_blocks = horizon;
  s.seed = seed;
  return s;
}

Scenario bdos_scenario(double alpha, double beta, bool stop, std::uint64_t horizon,
                       std::uint64_t seed) {
  Scenario s;
  s.miners.push_back({MinerId::of(0), alpha, StrategyKind::Bdos});
  s.miners.push_back({MinerId::of(1), (1.0 - alpha) / 2.0, StrategyKind::Rational});
  s.miners.push_back({MinerId::of(2), (1.0 - alpha) / 2.0, StrategyKind::Rational});
  s.mean_block_interval = 600.0;
  s.rushing = beta;
  s.horizon_blocks = horizon;
  s.seed = seed;
  s.rational_policy.stop_when_header_seen = stop;
  return s;
}

void check_conservation(const SimTrace& trace) {
  // Recount everything from the final tree; the live counters must agree.
  std::vector<BlockId> path = trace.main_path();
  std::set<BlockId> on_main(path.begin(), path.end());
  for (const MinerStats& m : trace.miners) {
    std::uint64_t found = 0, main_count = 0;
    for (const auto& [id, b] : trace.tree.blocks()) {
      if (b.miner != m.id) continue;
      ++found;
      if (on_main.count(id) && b.kind == BlockKind::Full) ++main_count;
    }
    CHECK(m.found == found);
    CHECK(m.on_main == main_count);
    CHECK(m.found == m.on_main + m.discarded);
  }
}

}  // namespace

TEST_CASE("a single honest miner produces a linear chain at the network rate") {
  Scenario s = honest_scenario({1.0}, 2000, 5);
  SimTrace trace = run(s);
  CHECK(trace.full_blocks_on_main == 2000);
  CHECK(trace.tree.size() == 2001);
  CHECK(trace.tree.tips().size() == 1);
  double mean = trace.extension_times.back() / static_cast<double>(trace.extension_times.size());
  CHECK(mean == doctest::Approx(600.0).epsilon(0.05));
  check_conservation(trace);
}

TEST_CASE("honest main-chain shares track mining power") {
  Scenario s = honest_scenario({0.6, 0.3, 0.1}, 20000, 42);
  SimTrace trace = run(s);
  auto shares = analytics::revenue_from_trace(trace);
  CHECK(shares[0] == doctest::Approx(0.6).epsilon(0.035));
  CHECK(shares[1] == doctest::Approx(0.3).epsilon(0.06));
  CHECK(shares[2] == doctest::Approx(0.1).epsilon(0.12));
  double total = shares[0] + shares[1] + shares[2];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  check_conservation(trace);
}

TEST_CASE("event times never decrease along the log") {
  SimTrace trace = run(selfish_scenario(0.4, 0.5, 3000, 9));
  double last = 0.0;
  for (const TraceEvent& e : trace.events) {
    CHECK(e.time >= last);
    last = e.time;
  }
}

TEST_CASE("identical scenarios produce byte-identical traces") {
  Scenario s = selfish_scenario(0.4, 0.3, 3000, 77);
  SimTrace a = run(s);
  SimTrace b = run(s);
  CHECK(io::trace_jsonl_text(a) == io::trace_jsonl_text(b));
  CHECK(io::summary_json_text(a) == io::summary_json_text(b));
}

TEST_CASE("different seeds differ, different horizons extend") {
  Scenario s = honest_scenario({0.5, 0.5}, 500, 1);
  Scenario s2 = s;
  s2.seed = 2;
  CHECK(io::trace_jsonl_text(run(s)) != io::trace_jsonl_text(run(s2)));
}

TEST_CASE("rational miners that never pause reduce to the honest baseline") {
  Scenario honest = honest_scenario({0.6, 0.3, 0.1}, 5000, 33);
  Scenario rational = honest;
  for (auto& m : rational.miners) m.strategy = StrategyKind::Rational;
  rational.rational_policy = {false, 0.0};
  CHECK(io::trace_jsonl_text(run(honest)) == io::trace_jsonl_text(run(rational)));
}

TEST_CASE("disabling the defense equals never configuring it") {
  Scenario configured = selfish_scenario(0.35, 0.0, 4000, 21);
  configured.defense.enabled = false;
  configured.defense.window_multiplier = 3.0;  // irrelevant while disabled
  Scenario untouched = selfish_scenario(0.35, 0.0, 4000, 21);
  SimTrace a = run(configured);
  SimTrace b = run(untouched);
  CHECK(io::trace_jsonl_text(a) == io::trace_jsonl_text(b));
  CHECK(a.windows.empty());
  for (const TraceEvent& e : a.events) {
    CHECK(e.kind != TraceEventKind::WindowOpened);
    CHECK(e.kind != TraceEventKind::DummyAppended);
  }
}

TEST_CASE("selfish mining without defense beats proportional and matches its chain") {
  SimTrace trace = run(selfish_scenario(0.4, 0.0, 60000, 7));
  auto shares = analytics::revenue_from_trace(trace);
  double predicted = analytics::selfish_revenue_prediction(0.4, 0.0);
  CHECK(shares[0] > 0.42);
  CHECK(shares[0] == doctest::Approx(predicted).epsilon(0.03));

  auto occ = analytics::occupancy_from_trace(trace);
  auto pi = stationary(analytics::build_selfish_chain(0.4, 0.0));
  CHECK(l1_distance(occ, pi) < 0.03);
  check_conservation(trace);
}

TEST_CASE("the selfish pool never orphans its own published blocks") {
  SimTrace trace = run(selfish_scenario(0.4, 0.2, 30000, 15));
  // Any pool block that was published and later fell off the main chain must
  // have lost a race to an honest resolution, never to a pool publication.
  // Operationally: every reorg (tip change) that orphans pool blocks is led
  // by a new tip that the pool itself mined.
  std::vector<BlockId> path = trace.main_path();
  std::set<BlockId> on_main(path.begin(), path.end());
  for (const TraceEvent& e : trace.events) {
    if (e.kind != TraceEventKind::TipChanged) continue;
    const Block& new_tip = trace.tree.at(e.block);
    if (new_tip.miner.value != 0) continue;  // pool-led reorg
    // Walk the orphaned branch: it must contain no pool block.
    BlockId old_tip = e.aux;
    const Block* cur = &trace.tree.at(old_tip);
    while (!trace.tree.is_ancestor(cur->id, e.block)) {
      CHECK(cur->miner.value != 0);
      if (cur->is_genesis()) break;
      cur = &trace.tree.at(cur->parent);
    }
  }
  check_conservation(trace);
}

TEST_CASE("withholding races occupy all three chain states") {
  SimTrace trace = run(bdos_scenario(0.3, 0.5, false, 30000, 13));
  auto occ = analytics::occupancy_from_trace(trace);
  REQUIRE(occ.size() == 3);
  CHECK(occ[0] > 0.1);
  CHECK(occ[1] > 0.05);
  CHECK(occ[2] > 0.02);
  auto pi = stationary(analytics::build_bdos_chain(0.3, 0.7, 0.5));
  CHECK(l1_distance(occ, pi) < 0.03);

  int races = 0;
  for (const TraceEvent& e : trace.events) {
    if (e.kind == TraceEventKind::RaceStarted) ++races;
  }
  CHECK(races > 100);
  check_conservation(trace);
}

TEST_CASE("pausing rational miners stall completely once a header is out") {
  SimTrace trace = run(bdos_scenario(0.3, 0.5, true, 200, 11));
  double first_header = -1.0;
  for (const TraceEvent& e : trace.events) {
    if (e.kind == TraceEventKind::HeaderPublished) {
      first_header = e.time;
      break;
    }
  }
  REQUIRE(first_header >= 0.0);
  for (const TraceEvent& e : trace.events) {
    if (e.kind == TraceEventKind::Accepted && e.time > first_header) {
      CHECK(trace.tree.at(e.block).miner.value == 0);  // only the attacker lands blocks
    }
  }
  check_conservation(trace);
}

TEST_CASE("a retiring attacker halts the chain for good") {
  Scenario s = bdos_scenario(0.3, 0.5, true, 200, 11);
  s.attacker_retires_after_halt = true;
  SimTrace trace = run(s);
  // The run ends early: one header, everyone paused, queue drained.
  CHECK(trace.full_blocks_on_main < 200);
  CHECK(trace.tree.at(trace.final_tip).height < 200);
}

TEST_CASE("the defense keeps the chain live under a withholding attack") {
  Scenario s = bdos_scenario(0.3, 0.5, true, 3000, 11);
  s.defense.enabled = true;
  SimTrace trace = run(s);
  CHECK(trace.dummy_blocks > 0);
  CHECK(trace.headers_discarded > 0);
  double window = s.defense_window();
  double prev = 0.0;
  for (double t : trace.extension_times) {
    CHECK(t - prev <= window + 1e-6);
    prev = t;
  }
  for (BlockId id : trace.main_path()) {
    BlockKind kind = trace.tree.at(id).kind;
    CHECK(kind != BlockKind::HeaderOnly);
  }
  check_conservation(trace);
}

TEST_CASE("a stubborn pool is punished by the defense, an aware pool is not") {
  Scenario aware = selfish_scenario(0.4, 0.0, 30000, 7);
  aware.defense.enabled = true;
  SimTrace aware_trace = run(aware);
  auto aware_shares = analytics::revenue_from_trace(aware_trace);
  CHECK(aware_shares[0] == doctest::Approx(0.40).epsilon(0.05));

  Scenario stubborn = aware;
  stubborn.selfish_stubborn = true;
  SimTrace stubborn_trace = run(stubborn);
  auto stubborn_shares = analytics::revenue_from_trace(stubborn_trace);
  CHECK(stubborn_shares[0] < aware_shares[0]);

  std::uint64_t discarded_private = 0;
  for (const TraceEvent& e : stubborn_trace.events) {
    if (e.kind == TraceEventKind::PrivateBranchDiscarded) ++discarded_private;
  }
  CHECK(discarded_private > 0);
  check_conservation(stubborn_trace);
  check_conservation(aware_trace);
}

TEST_CASE("no dummy block ever descends from a header-only block") {
  Scenario s = bdos_scenario(0.3, 0.5, false, 5000, 19);
  s.defense.enabled = true;
  SimTrace trace = run(s);
  for (const auto& [id, b] : trace.tree.blocks()) {
    if (b.kind != BlockKind::Dummy) continue;
    CHECK(trace.tree.at(b.parent).kind != BlockKind::HeaderOnly);
    for (BlockId anc : trace.tree.ancestor_path(id)) {
      CHECK(trace.tree.at(anc).kind != BlockKind::HeaderOnly);
    }
  }
}

TEST_CASE("in-flight blocks crossing an expiry are rejected; grace keeps them as orphans") {
  Scenario s = honest_scenario({0.4, 0.35, 0.25}, 250, 3);
  s.propagation_delay = 420.0;
  s.defense.enabled = true;
  SimTrace trace = run(s);
  CHECK(trace.stale_rejected > 0);
  std::set<BlockId> on_main;
  for (BlockId id : trace.main_path()) on_main.insert(id);
  for (const auto& [id, b] : trace.tree.blocks()) {
    if (b.kind == BlockKind::Dummy) CHECK(on_main.count(id) == 1);
  }

  Scenario graced = s;
  graced.grace_inflight = true;
  SimTrace gtrace = run(graced);
  // Stragglers survive as orphans; the dummies still rule the main chain.
  std::set<BlockId> gmain;
  for (BlockId id : gtrace.main_path()) gmain.insert(id);
  for (const auto& [id, b] : gtrace.tree.blocks()) {
    if (b.kind == BlockKind::Dummy) CHECK(gmain.count(id) == 1);
  }
  CHECK(gtrace.stale_rejected < trace.stale_rejected + 1);
}

TEST_CASE("race partitions validate their inputs") {
  RacePartition p = make_race_partition(0.3, 0.7, 0.5);
  CHECK(p.attacker_side == doctest::Approx(0.65));
  CHECK(p.honest_side == doctest::Approx(0.35));
  CHECK_THROWS_AS(make_race_partition(1.2, 0.7, 0.5), SimError);
  CHECK_THROWS_AS(make_race_partition(0.3, 0.7, 1.5), SimError);
  CHECK_THROWS_AS(resolve_race({1, 2, 3}, 0.3, 0.7, 0.5), SimError);
  CHECK_NOTHROW(resolve_race({1, 2}, 0.3, 0.7, 0.5));
}

TEST_CASE("zero-power attackers leave the chain in its idle state") {
  Scenario s = selfish_scenario(0.0, 0.0, 2000, 4);
  s.miners[1].power = 0.6;
  s.miners[2].power = 0.4;
  SimTrace trace = run(s);
  auto occ = analytics::occupancy_from_trace(trace);
  CHECK(occ[0] == doctest::Approx(1.0));
  CHECK(l1_distance(occ, stationary(analytics::build_selfish_chain(0.0, 0.0))) == 0.0);
}

TEST_CASE("scenario validation failures name the broken invariant") {
  Scenario s = honest_scenario({0.6, 0.3}, 100, 1);  // sums to 0.9
  CHECK_THROWS_WITH_AS(run(s), doctest::Contains("sum to 1"), SimError);
  Scenario two_attackers = selfish_scenario(0.3, 0.0, 100, 1);
  two_attackers.miners[1].strategy = StrategyKind::Bdos;
  CHECK_THROWS_AS(run(two_attackers), SimError);
}

TEST_CASE("rushing limits: beta one hands the race to the attacker side") {
  RacePartition all_in = make_race_partition(0.3, 0.7, 1.0);
  CHECK(all_in.attacker_side == doctest::Approx(1.0));
  CHECK(all_in.honest_side == doctest::Approx(0.0));
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_race_winner(all_in.attacker_side, all_in.honest_side, rng) == RaceSide::A);
  }

  RacePartition none = make_race_partition(0.3, 0.7, 0.0);
  CHECK(none.attacker_side == doctest::Approx(0.3));
  CHECK(none.honest_side == doctest::Approx(0.7));
}

TEST_CASE("propagation delay orphans some honest blocks but keeps the books") {
  Scenario s = honest_scenario({0.5, 0.3, 0.2}, 3000, 12);
  s.propagation_delay = 30.0;  // five percent of the block interval
  SimTrace trace = run(s);
  std::uint64_t discarded = 0;
  for (const MinerStats& m : trace.miners) discarded += m.discarded;
  CHECK(discarded > 0);
  auto shares = analytics::revenue_from_trace(trace);
  CHECK(shares[0] + shares[1] + shares[2] == doctest::Approx(1.0));
  check_conservation(trace);
}

TEST_CASE("slow propagation, tight windows, and a withholder coexist safely") {
  // Bodies and headers can cross expiries in flight here; nothing may stall
  // or break the accounting.
  Scenario s = bdos_scenario(0.3, 0.5, true, 800, 23);
  s.propagation_delay = 200.0;
  s.defense.enabled = true;
  s.defense.window_multiplier = 0.4;  // window 320s vs 200s flight time
  SimTrace trace = run(s);
  CHECK(trace.full_blocks_on_main == 800);
  CHECK(trace.dummy_blocks > 0);
  for (BlockId id : trace.main_path()) {
    CHECK(trace.tree.at(id).kind != BlockKind::HeaderOnly);
  }
  check_conservation(trace);

  Scenario s2 = s;
  s2.rational_policy.stop_when_header_seen = false;
  SimTrace trace2 = run(s2);
  CHECK(trace2.full_blocks_on_main == 800);
  check_conservation(trace2);
}
