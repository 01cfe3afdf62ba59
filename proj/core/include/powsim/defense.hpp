#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "powsim/block.hpp"
#include "powsim/scenario.hpp"

namespace powsim {

/// One open liveness window. The timer is measured from the latest full or
/// dummy main-chain extension; header publications do not touch it.
struct WindowState {
  std::uint64_t window_id = 0;
  double opened_at = 0.0;
  BlockId anchor_tip = kNoBlock;
  std::optional<BlockId> latest_dummy;  // most recent dummy on the chain
};

/// Reopens the window on a full or dummy main-chain extension.
WindowState on_main_chain_extended(const WindowState& ws, BlockId new_tip, double now);

bool window_expired(const WindowState& ws, double window_len, double now);

struct ExpiryOutcome {
  Block dummy;
  std::vector<BlockId> discarded_headers;
  WindowState next;
};

/// Expires the window: appends a reward-free dummy block to the tree and
/// reports which outstanding header-only blocks are dead. The dummy parents
/// on the single maximal published tip, or on the deepest common ancestor
/// when the tips are contested, so it never builds on disputed blocks.
/// Throws WindowNotExpired when called early.
ExpiryOutcome on_window_expiry(BlockTree& tree,
                               const WindowState& ws,
                               double window_len,
                               double now,
                               const std::vector<BlockId>& main_tips,
                               const std::vector<BlockId>& outstanding_headers,
                               BlockId dummy_id);

enum class AcceptDecision { Accept, AcceptOrphan, RejectStaleParent };

const char* to_string(AcceptDecision decision);

/// Post-expiry admission rule: once a dummy exists, only blocks building on
/// it (or on its descendants) extend the chain; anything parented on the
/// superseded prefix is stale. With `grace_inflight`, a full block created
/// before the dummy may still enter the tree as an orphan provided it cannot
/// outrank the dummy.
AcceptDecision accept_block(const BlockTree& tree,
                            BlockId parent,
                            double block_created_at,
                            const WindowState& ws,
                            bool defense_enabled,
                            bool grace_inflight);

}  // namespace powsim
