#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "powsim/error.hpp"

namespace powsim {

using BlockId = std::uint64_t;
inline constexpr BlockId kNoBlock = std::numeric_limits<BlockId>::max();

/// Dense miner index 0..n-1; the SYSTEM value marks blocks the protocol
/// itself mints (genesis, dummy blocks).
struct MinerId {
  static constexpr int kSystem = -1;

  int value = kSystem;

  constexpr bool is_system() const { return value == kSystem; }
  static constexpr MinerId system() { return MinerId{kSystem}; }
  static constexpr MinerId of(int index) { return MinerId{index}; }

  friend constexpr auto operator<=>(MinerId, MinerId) = default;
};

/// Full blocks carry a transaction count and a reward; header-only blocks
/// have a published header but a withheld body; dummy blocks are minted by
/// the system, carry no transactions and no reward.
enum class BlockKind { Full, HeaderOnly, Dummy };

const char* to_string(BlockKind kind);

struct Block {
  BlockId id = kNoBlock;
  BlockId parent = kNoBlock;  // kNoBlock only for genesis
  int height = 0;
  MinerId miner = MinerId::system();
  BlockKind kind = BlockKind::Full;
  int tx_count = 0;
  double created_at = 0.0;
  std::optional<double> published_at;  // absent while withheld

  bool is_genesis() const { return parent == kNoBlock; }
  bool is_published() const { return published_at.has_value(); }
};

/// Append-only tree of blocks rooted at a single genesis. Pure value type:
/// copies are independent, nothing is shared between simulation instances.
class BlockTree {
 public:
  static BlockTree with_genesis(double created_at = 0.0);

  /// Inserts a block under an existing parent. The height is recomputed
  /// from the parent; the caller-supplied height is ignored.
  void append(Block block);

  bool contains(BlockId id) const { return blocks_.count(id) != 0; }
  const Block& at(BlockId id) const;
  Block& at_mut(BlockId id);

  BlockId genesis() const { return genesis_; }
  std::size_t size() const { return blocks_.size(); }

  const std::set<BlockId>& tips() const { return tips_; }
  const std::vector<BlockId>& children(BlockId id) const;

  /// Genesis-to-tip path, inclusive on both ends.
  std::vector<BlockId> ancestor_path(BlockId tip) const;

  /// True when `ancestor` equals `descendant` or lies on its parent path.
  bool is_ancestor(BlockId ancestor, BlockId descendant) const;

  /// Deepest common ancestor of a non-empty set of blocks.
  BlockId common_ancestor(const std::vector<BlockId>& ids) const;

  const std::map<BlockId, Block>& blocks() const { return blocks_; }

 private:
  std::map<BlockId, Block> blocks_;
  std::map<BlockId, std::vector<BlockId>> children_;
  std::set<BlockId> tips_;
  BlockId genesis_ = kNoBlock;

  static const std::vector<BlockId> kNoChildren;
};

/// All published blocks of maximal effective height. Header-only blocks
/// (and everything hanging off them) contribute no height unless
/// `count_header_only` is set. Ties are reported, not resolved; race
/// resolution is the engine's job.
std::vector<BlockId> main_chain_tips(const BlockTree& tree, bool count_header_only);

}  // namespace powsim
