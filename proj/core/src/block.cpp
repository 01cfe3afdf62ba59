#include "powsim/block.hpp"

#include <algorithm>

namespace powsim {

const std::vector<BlockId> BlockTree::kNoChildren{};

const char* to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::Full: return "full";
    case BlockKind::HeaderOnly: return "header_only";
    case BlockKind::Dummy: return "dummy";
  }
  return "unknown";
}

BlockTree BlockTree::with_genesis(double created_at) {
  BlockTree tree;
  Block genesis;
  genesis.id = 0;
  genesis.parent = kNoBlock;
  genesis.height = 0;
  genesis.miner = MinerId::system();
  genesis.kind = BlockKind::Full;
  genesis.tx_count = 0;
  genesis.created_at = created_at;
  genesis.published_at = created_at;
  tree.genesis_ = genesis.id;
  tree.tips_.insert(genesis.id);
  tree.blocks_.emplace(genesis.id, std::move(genesis));
  return tree;
}

void BlockTree::append(Block block) {
  if (blocks_.count(block.id) != 0) {
    throw SimError(Err::DuplicateId, "block id " + std::to_string(block.id) + " already present");
  }
  auto parent_it = blocks_.find(block.parent);
  if (parent_it == blocks_.end()) {
    throw SimError(Err::UnknownParent,
                   "parent " + std::to_string(block.parent) + " of block " + std::to_string(block.id) +
                       " not in tree");
  }
  block.height = parent_it->second.height + 1;
  tips_.erase(block.parent);
  tips_.insert(block.id);
  children_[block.parent].push_back(block.id);
  blocks_.emplace(block.id, std::move(block));
}

const Block& BlockTree::at(BlockId id) const {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) {
    throw SimError(Err::UnknownId, "block " + std::to_string(id) + " not in tree");
  }
  return it->second;
}

Block& BlockTree::at_mut(BlockId id) {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) {
    throw SimError(Err::UnknownId, "block " + std::to_string(id) + " not in tree");
  }
  return it->second;
}

const std::vector<BlockId>& BlockTree::children(BlockId id) const {
  auto it = children_.find(id);
  return it == children_.end() ? kNoChildren : it->second;
}

std::vector<BlockId> BlockTree::ancestor_path(BlockId tip) const {
  std::vector<BlockId> path;
  const Block* cur = &at(tip);
  path.reserve(static_cast<std::size_t>(cur->height) + 1);
  while (true) {
    path.push_back(cur->id);
    if (cur->is_genesis()) break;
    cur = &at(cur->parent);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

bool BlockTree::is_ancestor(BlockId ancestor, BlockId descendant) const {
  const Block& anc = at(ancestor);
  const Block* cur = &at(descendant);
  while (cur->height > anc.height) {
    cur = &at(cur->parent);
  }
  return cur->id == ancestor;
}

BlockId BlockTree::common_ancestor(const std::vector<BlockId>& ids) const {
  if (ids.empty()) {
    throw SimError(Err::UnknownId, "common_ancestor of empty set");
  }
  BlockId acc = ids.front();
  for (std::size_t i = 1; i < ids.size(); ++i) {
    const Block* a = &at(acc);
    const Block* b = &at(ids[i]);
    while (a->height > b->height) a = &at(a->parent);
    while (b->height > a->height) b = &at(b->parent);
    while (a->id != b->id) {
      a = &at(a->parent);
      b = &at(b->parent);
    }
    acc = a->id;
  }
  return acc;
}

std::vector<BlockId> main_chain_tips(const BlockTree& tree, bool count_header_only) {
  // Walk the published subgraph from genesis; a header-only block cuts its
  // whole subtree out of the height race unless count_header_only is set.
  std::vector<BlockId> frontier{tree.genesis()};
  std::vector<BlockId> eligible;
  int best_height = -1;
  while (!frontier.empty()) {
    BlockId id = frontier.back();
    frontier.pop_back();
    const Block& b = tree.at(id);
    if (!b.is_published()) continue;
    if (!count_header_only && b.kind == BlockKind::HeaderOnly) continue;
    if (b.height > best_height) best_height = b.height;
    eligible.push_back(id);
    for (BlockId child : tree.children(id)) frontier.push_back(child);
  }
  std::vector<BlockId> result;
  for (BlockId id : eligible) {
    if (tree.at(id).height == best_height) result.push_back(id);
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace powsim
