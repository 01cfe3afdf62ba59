#include "powsim/defense.hpp"

namespace powsim {

const char* to_string(AcceptDecision decision) {
  switch (decision) {
    case AcceptDecision::Accept: return "accept";
    case AcceptDecision::AcceptOrphan: return "accept_orphan";
    case AcceptDecision::RejectStaleParent: return "reject_stale_parent";
  }
  return "unknown";
}

WindowState on_main_chain_extended(const WindowState& ws, BlockId new_tip, double now) {
  WindowState next = ws;
  next.window_id = ws.window_id + 1;
  next.opened_at = now;
  next.anchor_tip = new_tip;
  return next;
}

bool window_expired(const WindowState& ws, double window_len, double now) {
  // Same expression the timer is scheduled with, so the boundary instant
  // compares equal instead of rounding short.
  return now >= ws.opened_at + window_len;
}

ExpiryOutcome on_window_expiry(BlockTree& tree,
                               const WindowState& ws,
                               double window_len,
                               double now,
                               const std::vector<BlockId>& main_tips,
                               const std::vector<BlockId>& outstanding_headers,
                               BlockId dummy_id) {
  if (!window_expired(ws, window_len, now)) {
    throw SimError(Err::WindowNotExpired, "window " + std::to_string(ws.window_id) + " still open");
  }
  if (main_tips.empty()) {
    throw SimError(Err::EmptyChain, "no published main-chain tip to anchor a dummy on");
  }
  // Contested tips: back off to the last block everyone agrees on. The dummy
  // then ties the racers on height and outranks them by kind.
  BlockId parent = main_tips.size() == 1 ? main_tips.front() : tree.common_ancestor(main_tips);

  Block dummy;
  dummy.id = dummy_id;
  dummy.parent = parent;
  dummy.miner = MinerId::system();
  dummy.kind = BlockKind::Dummy;
  dummy.tx_count = 0;
  dummy.created_at = now;
  dummy.published_at = now;
  tree.append(dummy);

  ExpiryOutcome out;
  out.dummy = tree.at(dummy_id);
  const Block& anchor = tree.at(ws.anchor_tip);
  for (BlockId id : outstanding_headers) {
    const Block& b = tree.at(id);
    if (b.kind == BlockKind::HeaderOnly && b.height > anchor.height) {
      out.discarded_headers.push_back(id);
    }
  }
  out.next = on_main_chain_extended(ws, dummy_id, now);
  out.next.latest_dummy = dummy_id;
  return out;
}

AcceptDecision accept_block(const BlockTree& tree,
                            BlockId parent,
                            double block_created_at,
                            const WindowState& ws,
                            bool defense_enabled,
                            bool grace_inflight) {
  if (!defense_enabled || !ws.latest_dummy) return AcceptDecision::Accept;
  BlockId dummy = *ws.latest_dummy;
  if (parent == dummy || tree.is_ancestor(dummy, parent)) return AcceptDecision::Accept;
  const Block& d = tree.at(dummy);
  if (grace_inflight && block_created_at < d.created_at && tree.at(parent).height < d.height) {
    // In flight before the dummy existed and unable to outrank it: keep the
    // block as an orphan instead of bouncing it.
    return AcceptDecision::AcceptOrphan;
  }
  return AcceptDecision::RejectStaleParent;
}

}  // namespace powsim
