// Conjugate partition models: the CRP prior over partitions plus marginal
// Beta-Bernoulli likelihoods for binary feature matrices (mixture) and
// symmetric binary networks (relational / block model).
//
// Both models expose the same incremental interface consumed by
// WorkingState<Model>: per-block sufficient statistics, and exact log q deltas
// for jointly reassigning a set of observations.
#ifndef BLOCKMC_MODEL_HPP
#define BLOCKMC_MODEL_HPP

#include <cstdint>
#include <vector>

#include "blockmc/mathutil.hpp"
#include "blockmc/partition.hpp"

namespace blockmc {

struct ModelParams {
  double alpha = 1.0;       // CRP concentration
  double beta_plus = 1.0;   // Beta pseudo-count for ones
  double beta_minus = 1.0;  // Beta pseudo-count for zeros
  void validate() const;
};

// Binary feature matrix, d features x n observations.
class FeatureDataset {
 public:
  FeatureDataset(int d, int n, std::vector<std::uint8_t> values);
  int num_features() const { return d_; }
  int num_observations() const { return n_; }
  int value(int f, int j) const { return a_[static_cast<size_t>(f) * n_ + j]; }

 private:
  int d_, n_;
  std::vector<std::uint8_t> a_;  // row-major d x n
};

// Symmetric binary adjacency matrix with zero diagonal. Construction from an
// edge list symmetrizes, thresholds multiplicities at one and drops loops.
class NetworkDataset {
 public:
  NetworkDataset(int n, const std::vector<std::pair<int, int>>& edges);
  int num_observations() const { return n_; }
  bool edge(int u, int v) const { return adj_[static_cast<size_t>(u) * n_ + v] != 0; }
  const std::vector<int>& neighbors(int u) const { return nbr_[u]; }
  int degree(int u) const { return static_cast<int>(nbr_[u].size()); }
  int num_edges() const { return m_; }  // unordered

  template <class Fn>
  void for_each_edge(Fn&& fn) const {  // each unordered edge once, u < v
    for (int u = 0; u < n_; ++u)
      for (int v : nbr_[u])
        if (u < v) fn(u, v);
  }

 private:
  int n_, m_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<int>> nbr_;
};

// log CRP density of a full partition of {0..n-1}:
//   log [ Gamma(alpha) alpha^K / Gamma(alpha + n) * prod_k Gamma(|B_k|) ]
double crp_log_density(const Partition& z, double alpha);

// CRP prior with lgamma tables for incremental evaluation.
class CrpPrior {
 public:
  CrpPrior() = default;
  CrpPrior(double alpha, int n);

  double alpha() const { return alpha_; }
  double log_density(const std::vector<Block>& blocks, int n) const;
  // Change in log density terms from adding a set of size csize to a block of
  // size target_size (0 = new block), with `covered` observations currently
  // placed. Includes the Gamma(alpha + n) normalization change so that deltas
  // telescope exactly.
  double attach_delta(int target_size, int csize, int covered) const;

 private:
  double alpha_ = 1.0, log_alpha_ = 0.0;
  LgammaTable lg_int_;    // lgamma(k)
  LgammaTable lg_alpha_;  // lgamma(alpha + k)
};

class MixtureModel {
 public:
  struct LikStats {
    std::vector<int> size;
    std::vector<std::vector<int>> pos;  // [block][feature] counts of ones
  };
  struct MoveSet {
    Block members;
    int cs = 0;
    std::vector<int> cpos;
  };

  MixtureModel(FeatureDataset data, ModelParams params);

  int num_observations() const { return data_.num_observations(); }
  const ModelParams& params() const { return params_; }
  const CrpPrior& crp() const { return crp_; }
  const FeatureDataset& data() const { return data_; }

  double log_joint(const Partition& z) const;
  double log_likelihood(const Partition& z) const;

  LikStats make_stats(const std::vector<Block>& blocks) const;
  void prepare(MoveSet& m, const Block& c) const;
  void refresh(MoveSet&, const std::vector<int>&, int) const {}
  double attach_delta(const LikStats& s, const MoveSet& m, int target) const;
  void apply_attach(LikStats& s, const MoveSet& m, int target) const;
  void apply_detach(LikStats& s, const MoveSet& m, int source) const;
  void erase_block(LikStats& s, int k) const;

 private:
  double pair_term(int np, int d) const {
    return lgp_(np) + lgm_(d - np) - lgs_(d) - c0_;
  }

  FeatureDataset data_;
  ModelParams params_;
  CrpPrior crp_;
  LgammaTable lgp_, lgm_, lgs_;
  double c0_ = 0;
};

class RelationalModel {
 public:
  struct LikStats {
    std::vector<int> size;
    std::vector<std::vector<long long>> e;  // symmetric; e[k][k] = within edges
  };
  struct MoveSet {
    Block members;
    int cs = 0;
    long long e_in = 0;
    std::vector<long long> eb;  // edges from the moving set to each block
  };

  RelationalModel(NetworkDataset data, ModelParams params);

  int num_observations() const { return data_.num_observations(); }
  const ModelParams& params() const { return params_; }
  const CrpPrior& crp() const { return crp_; }
  const NetworkDataset& data() const { return data_; }

  double log_joint(const Partition& z) const;
  double log_likelihood(const Partition& z) const;

  LikStats make_stats(const std::vector<Block>& blocks) const;
  void prepare(MoveSet& m, const Block& c) const;
  void refresh(MoveSet& m, const std::vector<int>& slot, int num_blocks) const;
  double attach_delta(const LikStats& s, const MoveSet& m, int target) const;
  void apply_attach(LikStats& s, const MoveSet& m, int target) const;
  void apply_detach(LikStats& s, const MoveSet& m, int source) const;
  void erase_block(LikStats& s, int k) const;

 private:
  static long long within_dyads(long long sz) { return sz * (sz - 1) / 2; }
  double pair_term(long long np, long long d) const {
    return lgp_(static_cast<int>(np)) + lgm_(static_cast<int>(d - np)) -
           lgs_(static_cast<int>(d)) - c0_;
  }

  NetworkDataset data_;
  ModelParams params_;
  CrpPrior crp_;
  LgammaTable lgp_, lgm_, lgs_;
  double c0_ = 0;
};

}  // namespace blockmc

#endif
