// Shared fixtures and stub models for the unit suites.
#ifndef BLOCKMC_TESTS_HELPERS_HPP
#define BLOCKMC_TESTS_HELPERS_HPP

#include <vector>

#include "blockmc/datagen.hpp"
#include "blockmc/model.hpp"
#include "blockmc/partition.hpp"
#include "blockmc/rng.hpp"

namespace blockmc::testing {

// Prior stub with no preference between partitions.
struct FlatPrior {
  double attach_delta(int, int, int) const { return 0.0; }
  double log_density(const std::vector<Block>&, int) const { return 0.0; }
};

// q(z) identically one: every sweep outcome is equally likely.
class UniformModel {
 public:
  struct LikStats {};
  struct MoveSet {
    Block members;
    int cs = 0;
  };

  explicit UniformModel(int n) : n_(n) {}
  int num_observations() const { return n_; }
  const FlatPrior& crp() const { return prior_; }
  double log_joint(const Partition&) const { return 0.0; }
  double log_likelihood(const Partition&) const { return 0.0; }
  LikStats make_stats(const std::vector<Block>&) const { return {}; }
  void prepare(MoveSet& m, const Block& c) const {
    m.members = c;
    m.cs = static_cast<int>(c.size());
  }
  void refresh(MoveSet&, const std::vector<int>&, int) const {}
  double attach_delta(const LikStats&, const MoveSet&, int) const { return 0.0; }
  void apply_attach(LikStats&, const MoveSet&, int) const {}
  void apply_detach(LikStats&, const MoveSet&, int) const {}
  void erase_block(LikStats&, int) const {}

 private:
  int n_;
  FlatPrior prior_;
};

// Flat likelihood over a real CRP prior.
class CrpOnlyModel {
 public:
  struct LikStats {};
  struct MoveSet {
    Block members;
    int cs = 0;
  };

  CrpOnlyModel(int n, double alpha) : n_(n), crp_(alpha, n) {}
  int num_observations() const { return n_; }
  const CrpPrior& crp() const { return crp_; }
  double log_joint(const Partition& z) const {
    return crp_.log_density(z.blocks(), n_);
  }
  double log_likelihood(const Partition&) const { return 0.0; }
  LikStats make_stats(const std::vector<Block>&) const { return {}; }
  void prepare(MoveSet& m, const Block& c) const {
    m.members = c;
    m.cs = static_cast<int>(c.size());
  }
  void refresh(MoveSet&, const std::vector<int>&, int) const {}
  double attach_delta(const LikStats&, const MoveSet&, int) const { return 0.0; }
  void apply_attach(LikStats&, const MoveSet&, int) const {}
  void apply_detach(LikStats&, const MoveSet&, int) const {}
  void erase_block(LikStats&, int) const {}

 private:
  int n_;
  CrpPrior crp_;
};

// Likelihood stub with huge weight spreads, for log-sum-exp stability checks.
class ExtremeModel {
 public:
  struct LikStats {};
  struct MoveSet {
    Block members;
    int cs = 0;
  };

  explicit ExtremeModel(int n) : n_(n) {}
  int num_observations() const { return n_; }
  const FlatPrior& crp() const { return prior_; }
  double log_joint(const Partition&) const { return 0.0; }
  double log_likelihood(const Partition&) const { return 0.0; }
  LikStats make_stats(const std::vector<Block>&) const { return {}; }
  void prepare(MoveSet& m, const Block& c) const {
    m.members = c;
    m.cs = static_cast<int>(c.size());
  }
  void refresh(MoveSet&, const std::vector<int>&, int) const {}
  double attach_delta(const LikStats&, const MoveSet&, int target) const {
    return target < 0 ? -1e6 : 1e6;
  }
  void apply_attach(LikStats&, const MoveSet&, int) const {}
  void apply_detach(LikStats&, const MoveSet&, int) const {}
  void erase_block(LikStats&, int) const {}

 private:
  int n_;
  FlatPrior prior_;
};

inline Partition make_partition(int n, std::vector<Block> blocks) {
  return Partition(n, std::move(blocks));
}

inline RelationalModel fig3_model(ModelParams params = {}) {
  return RelationalModel(verification_network(), params);
}

inline Partition random_partition(int n, int max_blocks, Rng& rng) {
  std::vector<Block> blocks(max_blocks);
  for (int i = 0; i < n; ++i) blocks[rng.uniform_int(max_blocks)].push_back(i);
  std::vector<Block> kept;
  for (auto& b : blocks) {
    if (!b.empty()) kept.push_back(std::move(b));
  }
  return Partition(n, std::move(kept));
}

inline MixtureModel small_mixture_model(int n, int d, std::uint64_t seed,
                                        ModelParams params = {}) {
  Rng rng(seed);
  std::vector<std::uint8_t> a(static_cast<size_t>(d) * n);
  for (auto& v : a) v = rng.uniform01() < 0.4 ? 1 : 0;
  return MixtureModel(FeatureDataset(d, n, std::move(a)), params);
}

inline RelationalModel small_relational_model(int n, std::uint64_t seed,
                                              ModelParams params = {}) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.uniform01() < 0.3) edges.emplace_back(u, v);
    }
  }
  return RelationalModel(NetworkDataset(n, edges), params);
}

}  // namespace blockmc::testing

#endif
