// Mutable partition state for proposal construction. Keeps the block list,
// an observation -> block index, the model's sufficient statistics, and a
// running log q offset in sync through detach/attach moves.
//
// All deltas are computed from integer counts, so a replayed path performs
// bit-identical arithmetic to the path it replays.
#ifndef BLOCKMC_WORKING_STATE_HPP
#define BLOCKMC_WORKING_STATE_HPP

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <vector>

#include "blockmc/model.hpp"
#include "blockmc/partition.hpp"

namespace blockmc {

inline constexpr int kNewBlock = -1;

template <class Model>
class WorkingState {
 public:
  WorkingState(const Model& model, const Partition& z)
      : model_(&model),
        n_(model.num_observations()),
        blocks_(z.blocks()),
        slot_(n_, -1),
        covered_(z.covered()) {
    for (size_t k = 0; k < blocks_.size(); ++k) {
      for (int x : blocks_[k]) slot_[x] = static_cast<int>(k);
    }
    stats_ = model.make_stats(blocks_);
  }

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const Block& block(int k) const { return blocks_[k]; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int slot_of(int i) const { return slot_[i]; }
  int covered() const { return covered_; }
  // Accumulated log q(current) - log q(initial), exact by telescoping.
  double offset() const { return offset_; }

  Partition snapshot() const {
    assert(!staged_);
    return Partition(n_, blocks_);
  }

  // Stages c for reassignment, detaching it from its current block if placed.
  // c must be ascending and either inside a single block or fully unplaced.
  void begin_move(const Block& c) {
    assert(!staged_);
    if (c.empty()) throw std::invalid_argument("empty move set");
    assert(std::is_sorted(c.begin(), c.end()));
    const int src = slot_[c.front()];
    for (int x : c) {
      if (slot_[x] != src) throw std::invalid_argument("move set straddles blocks");
    }
    model_->prepare(move_, c);
    cur_ = c;
    staged_ = true;
    if (src < 0) {
      remainder_ = kNewBlock;
      model_->refresh(move_, slot_, num_blocks());
      return;
    }
    for (int x : c) slot_[x] = -1;
    covered_ -= static_cast<int>(c.size());
    if (blocks_[src].size() == c.size()) {
      erase_block(src);
      remainder_ = kNewBlock;
      model_->refresh(move_, slot_, num_blocks());
    } else {
      Block kept;
      std::set_difference(blocks_[src].begin(), blocks_[src].end(), c.begin(),
                          c.end(), std::back_inserter(kept));
      assert(kept.size() + c.size() == blocks_[src].size());
      blocks_[src] = std::move(kept);
      remainder_ = src;
      model_->refresh(move_, slot_, num_blocks());
      model_->apply_detach(stats_, move_, src);
    }
    offset_ -= attach_delta(remainder_);
  }

  // Block index holding the rest of the staged set's source block, or
  // kNewBlock if the source vanished or the set was unplaced.
  int staged_remainder() const {
    assert(staged_);
    return remainder_;
  }

  // Exact change in log q from attaching the staged set to `target`
  // (kNewBlock for a fresh block). Valid while staged.
  double attach_delta(int target) const {
    assert(staged_);
    const int tsize = target == kNewBlock
                          ? 0
                          : static_cast<int>(blocks_[target].size());
    return model_->crp().attach_delta(tsize, move_.cs, covered_) +
           model_->attach_delta(stats_, move_, target);
  }

  void commit(int target) {
    assert(staged_);
    offset_ += attach_delta(target);
    model_->apply_attach(stats_, move_, target);
    if (target == kNewBlock) {
      blocks_.push_back(cur_);
      target = num_blocks() - 1;
    } else {
      Block merged;
      merged.reserve(blocks_[target].size() + cur_.size());
      std::merge(blocks_[target].begin(), blocks_[target].end(), cur_.begin(),
                 cur_.end(), std::back_inserter(merged));
      blocks_[target] = std::move(merged);
    }
    for (int x : cur_) slot_[x] = target;
    covered_ += static_cast<int>(cur_.size());
    staged_ = false;
  }

  // Leaves the staged set out of the partition entirely.
  void drop_staged() {
    assert(staged_);
    staged_ = false;
  }

 private:
  void erase_block(int k) {
    blocks_.erase(blocks_.begin() + k);
    for (size_t b = k; b < blocks_.size(); ++b) {
      for (int x : blocks_[b]) slot_[x] = static_cast<int>(b);
    }
    model_->erase_block(stats_, k);
  }

  const Model* model_;
  int n_;
  std::vector<Block> blocks_;
  std::vector<int> slot_;
  int covered_ = 0;
  double offset_ = 0;
  typename Model::LikStats stats_;
  typename Model::MoveSet move_;
  Block cur_;
  bool staged_ = false;
  int remainder_ = kNewBlock;
};

// log q(z with c moved into target) - log q(z), computed incrementally.
// target is a block index of z or kNewBlock. c must lie inside one block of z
// or be disjoint from its coverage.
template <class Model>
double delta_log_joint(const Model& model, const Partition& z, const Block& c,
                       int target) {
  if (target != kNewBlock && (target < 0 || target >= z.num_blocks())) {
    throw std::invalid_argument("invalid target block");
  }
  WorkingState<Model> ws(model, z);
  ws.begin_move(c);
  int resolved = kNewBlock;
  if (target != kNewBlock) {
    // Identify the target by a representative that is not moving; if the whole
    // target block is the moving set, the move is a no-op re-creation.
    for (int x : z.block(target)) {
      if (!std::binary_search(c.begin(), c.end(), x)) {
        resolved = ws.slot_of(x);
        break;
      }
    }
  }
  return ws.offset() + ws.attach_delta(resolved);
}

}  // namespace blockmc

#endif
