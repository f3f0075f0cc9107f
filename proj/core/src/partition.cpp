#include "blockmc/partition.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace blockmc {

namespace {

void check_sorted_unique(const Block& b) {
  for (size_t i = 1; i < b.size(); ++i) {
    if (b[i - 1] >= b[i]) throw std::invalid_argument("block has duplicate elements");
  }
}

}  // namespace

Partition::Partition(int n, std::vector<Block> blocks)
    : n_(n), blocks_(std::move(blocks)) {
  if (n < 0) throw std::invalid_argument("negative universe size");
  std::vector<char> seen(n, 0);
  for (auto& b : blocks_) {
    if (b.empty()) throw std::invalid_argument("empty block");
    std::sort(b.begin(), b.end());
    check_sorted_unique(b);
    for (int x : b) {
      if (x < 0 || x >= n) throw std::invalid_argument("element outside universe");
      if (seen[x]) throw std::invalid_argument("blocks not disjoint");
      seen[x] = 1;
    }
    covered_ += static_cast<int>(b.size());
  }
}

Partition Partition::singletons(int n) {
  std::vector<Block> b(n);
  for (int i = 0; i < n; ++i) b[i] = {i};
  return Partition(n, std::move(b));
}

Partition Partition::one_block(int n) {
  Block all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  return Partition(n, {std::move(all)});
}

bool Partition::covers(int i) const { return block_index_of(i) >= 0; }

int Partition::block_index_of(int i) const {
  for (size_t k = 0; k < blocks_.size(); ++k) {
    if (std::binary_search(blocks_[k].begin(), blocks_[k].end(), i)) {
      return static_cast<int>(k);
    }
  }
  return -1;
}

const Block& Partition::block_of(int i) const {
  int k = block_index_of(i);
  if (k < 0) throw std::out_of_range("observation not covered by partition");
  return blocks_[k];
}

std::vector<int> Partition::labels() const {
  std::vector<int> lab(n_, -1);
  for (size_t k = 0; k < blocks_.size(); ++k) {
    for (int x : blocks_[k]) lab[x] = static_cast<int>(k);
  }
  return lab;
}

bool Partition::set_equal(const Partition& other) const {
  return n_ == other.n_ && canonical_key(*this) == canonical_key(other);
}

Partition remove_set(const Partition& z, const Block& a) {
  std::vector<Block> out;
  out.reserve(z.num_blocks());
  for (const Block& b : z.blocks()) {
    Block kept;
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                        std::back_inserter(kept));
    if (!kept.empty()) out.push_back(std::move(kept));
  }
  return Partition(z.universe(), std::move(out));
}

Partition concat(const Partition& za, const Partition& zb) {
  if (za.universe() != zb.universe()) {
    throw std::invalid_argument("concat: universe mismatch");
  }
  std::vector<Block> out = za.blocks();
  for (const Block& b : zb.blocks()) {
    for (int x : b) {
      if (za.covers(x)) throw std::invalid_argument("concat: overlapping coverage");
    }
    out.push_back(b);
  }
  return Partition(za.universe(), std::move(out));
}

Partition coarsest_common_refinement(const Partition& z, const Partition& z2) {
  if (z.universe() != z2.universe()) {
    throw std::invalid_argument("refinement: universe mismatch");
  }
  std::vector<int> l1 = z.labels(), l2 = z2.labels();
  for (int i = 0; i < z.universe(); ++i) {
    if ((l1[i] < 0) != (l2[i] < 0)) {
      throw std::invalid_argument("refinement: coverage mismatch");
    }
  }
  std::vector<Block> out;
  for (const Block& a : z.blocks()) {
    // Split a by the z2 block of each element, preserving z2 block order.
    std::vector<std::pair<int, Block>> parts;
    for (int x : a) {
      int k2 = l2[x];
      auto it = std::find_if(parts.begin(), parts.end(),
                             [&](const auto& p) { return p.first == k2; });
      if (it == parts.end()) {
        parts.emplace_back(k2, Block{x});
      } else {
        it->second.push_back(x);
      }
    }
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& p : parts) out.push_back(std::move(p.second));
  }
  return Partition(z.universe(), std::move(out));
}

Partition coarsest_common_refinement(const Partition& z, const Partition& z2,
                                     const Partition& z3) {
  return coarsest_common_refinement(coarsest_common_refinement(z, z2), z3);
}

Partition relabel(const Partition& z, const std::vector<int>& perm) {
  const int n = z.universe();
  if (static_cast<int>(perm.size()) != n) {
    throw std::invalid_argument("relabel: permutation size mismatch");
  }
  std::vector<char> hit(n, 0);
  for (int v : perm) {
    if (v < 0 || v >= n || hit[v]) throw std::invalid_argument("relabel: not a bijection");
    hit[v] = 1;
  }
  std::vector<Block> out;
  out.reserve(z.num_blocks());
  for (const Block& b : z.blocks()) {
    Block nb;
    nb.reserve(b.size());
    for (int x : b) nb.push_back(perm[x]);
    out.push_back(std::move(nb));
  }
  return Partition(n, std::move(out));
}

namespace {

std::vector<const Block*> canonical_order(const Partition& z) {
  std::vector<const Block*> ptr;
  ptr.reserve(z.num_blocks());
  for (const Block& b : z.blocks()) ptr.push_back(&b);
  std::sort(ptr.begin(), ptr.end(),
            [](const Block* a, const Block* b) { return a->front() < b->front(); });
  return ptr;
}

std::string join_blocks(const std::vector<const Block*>& ptr, int base) {
  std::string s;
  for (size_t k = 0; k < ptr.size(); ++k) {
    if (k) s += ';';
    const Block& b = *ptr[k];
    for (size_t i = 0; i < b.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(b[i] + base);
    }
  }
  return s;
}

Partition parse_blocks(const std::string& text, int n, int base) {
  std::vector<Block> blocks;
  Block cur;
  int val = 0;
  bool have = false;
  auto flush_val = [&] {
    if (!have) throw std::invalid_argument("partition text: missing element");
    cur.push_back(val - base);
    val = 0;
    have = false;
  };
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      val = val * 10 + (c - '0');
      have = true;
    } else if (c == ',') {
      flush_val();
    } else if (c == ';') {
      flush_val();
      blocks.push_back(std::move(cur));
      cur.clear();
    } else if (c == ' ' || c == '\t' || c == '\r') {
      // ignore
    } else {
      throw std::invalid_argument("partition text: unexpected character");
    }
  }
  if (have) flush_val();
  if (!cur.empty()) blocks.push_back(std::move(cur));
  return Partition(n, std::move(blocks));
}

}  // namespace

CanonicalPartition canonical(const Partition& z) { return {canonical_key(z)}; }

std::string canonical_key(const Partition& z) {
  return join_blocks(canonical_order(z), 0);
}

Partition partition_from_key(const std::string& key, int n) {
  return parse_blocks(key, n, 0);
}

std::string to_text(const Partition& z) {
  return join_blocks(canonical_order(z), 1);
}

Partition partition_from_text(const std::string& text, int n) {
  return parse_blocks(text, n, 1);
}

}  // namespace blockmc
