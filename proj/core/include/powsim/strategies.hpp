#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "powsim/block.hpp"
#include "powsim/scenario.hpp"

namespace powsim {

// ---------------------------------------------------------------------------
// Withholding (header-only) attacker
// ---------------------------------------------------------------------------

enum class BdosPhase { Idle, HeaderOut, Racing };

const char* to_string(BdosPhase phase);

/// Attacker-side protocol state. While a header is out, `withheld` names the
/// block whose body the attacker is sitting on.
struct BdosState {
  BdosPhase phase = BdosPhase::Idle;
  std::optional<BlockId> withheld;
  bool header_published = false;
};

enum class BdosEvent { SelfBlockFound, RivalBlockPublished, RaceResolved, DefenseDiscard };

enum class BdosActionKind {
  PublishHeader,  // reveal the header of `block`, keep the body back
  PublishBody,    // reveal the withheld body of `block`
  PublishFull,    // publish `block` outright (race extension)
};

struct BdosAction {
  BdosActionKind kind;
  BlockId block = kNoBlock;
};

struct BdosStep {
  BdosState state;
  std::vector<BdosAction> actions;
};

/// Pure transition function. `block` is the freshly found block for
/// SelfBlockFound and ignored otherwise. Throws IllegalTransition for
/// event/phase pairs the protocol cannot produce.
BdosStep bdos_step(const BdosState& state, BdosEvent event, BlockId block = kNoBlock);

// ---------------------------------------------------------------------------
// Selfish pool
// ---------------------------------------------------------------------------

/// Pool-side protocol state. `branch` lists every block of the private fork
/// in height order; the first `published_upto` of them have been revealed
/// one at a time while defending a long lead.
struct SelfishState {
  std::vector<BlockId> branch;
  std::size_t published_upto = 0;
  int base_height = 0;    // public height at the fork point
  int public_height = 0;  // height of the public main chain
  bool racing = false;

  int private_tip_height() const {
    return base_height + static_cast<int>(branch.size());
  }
  /// Private lead over the public chain; 0 when nothing is withheld.
  int lead() const {
    return branch.empty() ? 0 : private_tip_height() - public_height;
  }
  bool holds_private() const { return published_upto < branch.size(); }
};

SelfishState reset_selfish(int public_height);

enum class SelfishEvent { SelfBlockFound, HonestBlockPublished, RaceResolved };

enum class SelfishActionKind {
  HoldPrivate,    // keep the found block secret
  PublishBlocks,  // reveal the listed private blocks, oldest first
  AdoptPublic,    // abandon the fork point and follow the public chain
};

struct SelfishAction {
  SelfishActionKind kind;
  std::vector<BlockId> blocks;
};

struct SelfishStep {
  SelfishState state;
  std::vector<SelfishAction> actions;
};

struct SelfishCtx {
  BlockId found_block = kNoBlock;  // SelfBlockFound only
  bool race_won = false;           // RaceResolved only
  int new_public_height = 0;       // RaceResolved only
};

/// Pure transition function for the pool. Lead accounting:
///  - found at lead 0: withhold (state 1)
///  - honest block at lead 1: reveal the branch, race (state 2)
///  - found during the race: publish immediately, claim both blocks
///  - honest block at lead >= 3: reveal exactly one matching block
///  - honest block at lead 2: the lead collapses to one, reveal everything
SelfishStep selfish_step(const SelfishState& state, SelfishEvent event, const SelfishCtx& ctx = {});

/// Collapsed chain-state index: 0 idle, 1 one-block lead, 2 race, 3 lead >= 2.
int selfish_state_index(const SelfishState& state);

// ---------------------------------------------------------------------------
// Rational miners
// ---------------------------------------------------------------------------

/// What a rational miner can observe about the network.
struct PublicView {
  bool header_outstanding = false;
  double honest_race_win_prob = 1.0;  // chance the honest side keeps the next slot
  BlockId honest_tip = kNoBlock;
};

struct MiningDecision {
  bool pause = false;
  BlockId target = kNoBlock;
};

MiningDecision rational_decision(const RationalPolicy& policy, const PublicView& view);

}  // namespace powsim
