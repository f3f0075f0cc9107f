// Partition of observation indices into disjoint non-empty blocks, plus the
// small set algebra the samplers are written in.
//
// A Partition is an ordered list of blocks; each block is an ascending vector
// of indices in {0..n-1}. A partition need not cover the whole universe:
// partially covered values arise while proposals are being constructed.
#ifndef BLOCKMC_PARTITION_HPP
#define BLOCKMC_PARTITION_HPP

#include <span>
#include <string>
#include <vector>

namespace blockmc {

using Block = std::vector<int>;

class Partition {
 public:
  Partition() = default;
  // Takes ownership of `blocks`; elements are sorted, blocks validated to be
  // non-empty, disjoint and within [0, n). Block order is preserved.
  Partition(int n, std::vector<Block> blocks);

  static Partition singletons(int n);
  static Partition one_block(int n);

  int universe() const { return n_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int covered() const { return covered_; }
  bool empty() const { return blocks_.empty(); }

  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(int k) const { return blocks_[k]; }

  bool covers(int i) const;
  // Index of the block containing i, or -1.
  int block_index_of(int i) const;
  // The unique block containing i; throws std::out_of_range if uncovered.
  const Block& block_of(int i) const;
  // Observation -> block index map (-1 where uncovered). O(n).
  std::vector<int> labels() const;

  bool set_equal(const Partition& other) const;

 private:
  int n_ = 0;
  int covered_ = 0;
  std::vector<Block> blocks_;
};

// z with the set A removed from every block; empty blocks dropped, the order
// of the survivors preserved.
Partition remove_set(const Partition& z, const Block& a);

// Blocks of zb appended after those of za. Preconditions: same universe,
// disjoint coverage.
Partition concat(const Partition& za, const Partition& zb);

// Coarsest common refinement { A ∩ B : A ∈ z, B ∈ z2, A ∩ B ≠ ∅ }.
// Both partitions must cover the same set.
Partition coarsest_common_refinement(const Partition& z, const Partition& z2);
Partition coarsest_common_refinement(const Partition& z, const Partition& z2,
                                     const Partition& z3);

// Each index i replaced by perm[i]; perm must be a bijection on {0..n-1}.
Partition relabel(const Partition& z, const std::vector<int>& perm);

// Label-order-normalized encoding: blocks sorted by minimum element, elements
// ascending, e.g. "0,1;2". Two partitions are set-equal iff their canonical
// keys are identical.
struct CanonicalPartition {
  std::string key;
  friend bool operator==(const CanonicalPartition&,
                         const CanonicalPartition&) = default;
  friend auto operator<=>(const CanonicalPartition&,
                          const CanonicalPartition&) = default;
};

CanonicalPartition canonical(const Partition& z);
std::string canonical_key(const Partition& z);
Partition partition_from_key(const std::string& key, int n);

// Textual form for files: 1-based, canonical order, e.g. "1,2;3".
std::string to_text(const Partition& z);
Partition partition_from_text(const std::string& text, int n);

}  // namespace blockmc

template <>
struct std::hash<blockmc::CanonicalPartition> {
  size_t operator()(const blockmc::CanonicalPartition& c) const noexcept {
    return std::hash<std::string>{}(c.key);
  }
};

#endif
