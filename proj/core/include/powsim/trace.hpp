#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "powsim/block.hpp"
#include "powsim/scenario.hpp"

namespace powsim {

enum class TraceEventKind {
  Found,
  HeaderPublished,
  Published,       // full block (or private branch block) revealed
  BodyPublished,   // withheld body revealed for an existing header
  Accepted,
  RejectedStale,
  RaceStarted,
  RaceResolved,
  WindowOpened,
  WindowExpired,
  DummyAppended,
  HeaderDiscarded,
  PrivateBranchDiscarded,
  MinerPaused,
  MinerResumed,
  TipChanged,
};

const char* to_string(TraceEventKind kind);

struct TraceEvent {
  double time = 0.0;
  std::uint64_t seq = 0;
  TraceEventKind kind = TraceEventKind::Found;
  int miner = MinerId::kSystem;
  BlockId block = kNoBlock;
  BlockId aux = kNoBlock;  // second block (race rival, new tip, ...)
};

enum class WindowOutcome { HonestBlock, AttackerBlock, Expired, RunEnd };

const char* to_string(WindowOutcome outcome);

/// Closed liveness window with the mining effort (power x active seconds)
/// spent inside it, split by class.
struct WindowRecord {
  std::uint64_t id = 0;
  double opened_at = 0.0;
  double closed_at = 0.0;
  WindowOutcome outcome = WindowOutcome::RunEnd;
  double honest_effort = 0.0;
  double attacker_effort = 0.0;
  double total_effort = 0.0;
};

struct MinerStats {
  MinerId id;
  double power = 0.0;
  StrategyKind strategy = StrategyKind::Honest;
  std::uint64_t found = 0;
  std::uint64_t on_main = 0;
  std::uint64_t discarded = 0;
};

/// Full record of one simulation: the event log, the final block tree, and
/// aggregates that are recomputable from both.
struct SimTrace {
  Scenario scenario;
  std::vector<TraceEvent> events;
  BlockTree tree = BlockTree::with_genesis();
  BlockId final_tip = kNoBlock;
  std::vector<MinerStats> miners;

  std::uint64_t full_blocks_on_main = 0;
  std::uint64_t dummy_blocks = 0;
  std::uint64_t headers_discarded = 0;
  std::uint64_t stale_rejected = 0;
  std::uint64_t processed_events = 0;

  std::vector<WindowRecord> windows;

  /// Attack-chain occupancy: counts of the strategy state observed at each
  /// block-find step. `chain_states` is 0 (no attacker), 3, or 4.
  int chain_states = 0;
  std::array<std::uint64_t, 4> state_steps{};
  std::uint64_t total_steps = 0;

  /// Times of every main-chain tip advance (full and dummy blocks).
  std::vector<double> extension_times;

  std::vector<BlockId> main_path() const { return tree.ancestor_path(final_tip); }
};

}  // namespace powsim
