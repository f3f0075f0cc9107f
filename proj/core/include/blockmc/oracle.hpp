// Exact small-instance machinery: enumeration of all partitions, exact
// posteriors, independent reference likelihoods, and exhaustive branch
// enumeration of the proposal kernels. Testing and verification only; nothing
// here is on a sampling hot path.
#ifndef BLOCKMC_ORACLE_HPP
#define BLOCKMC_ORACLE_HPP

#include "blockmc/kernels.hpp"
#include "blockmc/model.hpp"

namespace blockmc {

// All set partitions of {0..n-1} in restricted-growth-string order; every
// returned partition is in canonical block order. 1 <= n <= 12.
std::vector<Partition> enumerate_partitions(int n);

struct PartitionTable {
  std::vector<Partition> partitions;
  std::vector<double> prob;
};

template <class Model>
PartitionTable exact_posterior(const Model& model) {
  const int n = model.num_observations();
  if (n > 10) throw std::invalid_argument("exact posterior limited to n <= 10");
  PartitionTable table;
  table.partitions = enumerate_partitions(n);
  std::vector<double> lp(table.partitions.size());
  for (size_t k = 0; k < table.partitions.size(); ++k) {
    lp[k] = model.log_joint(table.partitions[k]);
  }
  const double lse = log_sum_exp(lp);
  table.prob.resize(lp.size());
  for (size_t k = 0; k < lp.size(); ++k) table.prob[k] = std::exp(lp[k] - lse);
  return table;
}

// Direct-likelihood reference implementations sharing nothing with the
// incremental machinery: counts from raw double loops over the data, the CRP
// evaluated through its sequential predictive form.
double reference_log_joint(const FeatureDataset& data, const ModelParams& params,
                           const Partition& z);
double reference_log_joint(const NetworkDataset& data, const ModelParams& params,
                           const Partition& z);

struct PathLeaf {
  std::vector<int> choices;
  Partition z_star;
  MoveKind kind = MoveKind::kSplit;
  double log_prob = 0;      // product of every choice probability on the path
  double kernel_log_t = 0;  // the T the kernel itself reports for the path
};

// Walks every categorical choice the kernel can make from z under the given
// background information, returning one leaf per complete choice sequence.
template <class Model>
std::vector<PathLeaf> enumerate_kernel_paths(const Model& model, SamplerKind kernel,
                                             const Partition& z, int i, int j,
                                             const Partition* za = nullptr,
                                             const Partition* zb = nullptr, int L = 0,
                                             std::uint64_t max_leaves = 10'000'000) {
  std::vector<PathLeaf> leaves;
  std::vector<int> script;
  for (;;) {
    ScriptChooser sc{&script};
    ScriptedKernelResult r =
        run_kernel_scripted(model, kernel, z, i, j, za, zb, L, Ordering{}, sc);
    leaves.push_back(
        {script, std::move(r.z_star), r.kind, sc.log_prob_sum, r.kernel_log_t});
    if (leaves.size() > max_leaves) {
      throw std::runtime_error("kernel path enumeration exceeds leaf budget");
    }
    while (!script.empty() && script.back() + 1 >= sc.arity[script.size() - 1]) {
      script.pop_back();
      sc.arity.pop_back();
    }
    if (script.empty()) break;
    ++script.back();
  }
  return leaves;
}

}  // namespace blockmc

#endif
