#include "blockmc/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace blockmc {

std::vector<Partition> enumerate_partitions(int n) {
  if (n < 1 || n > 12) throw std::invalid_argument("partition enumeration needs 1 <= n <= 12");
  std::vector<Partition> out;
  std::vector<int> rgs(n, 0);
  for (;;) {
    int num_blocks = 0;
    for (int v : rgs) num_blocks = std::max(num_blocks, v + 1);
    std::vector<Block> blocks(num_blocks);
    for (int i = 0; i < n; ++i) blocks[rgs[i]].push_back(i);
    out.emplace_back(n, std::move(blocks));
    // next restricted growth string
    int pos = n - 1;
    for (; pos > 0; --pos) {
      int mx = 0;
      for (int k = 0; k < pos; ++k) mx = std::max(mx, rgs[k]);
      if (rgs[pos] <= mx) break;
    }
    if (pos == 0) break;
    ++rgs[pos];
    for (int k = pos + 1; k < n; ++k) rgs[k] = 0;
  }
  return out;
}

namespace {

// CRP through the sequential seating probabilities; a deliberately different
// route than the Gamma-function density.
double crp_sequential(const Partition& z, double alpha) {
  const int n = z.universe();
  std::vector<int> labels = z.labels();
  std::vector<int> count(z.num_blocks(), 0);
  double lp = 0;
  for (int t = 0; t < n; ++t) {
    const int b = labels[t];
    if (count[b] == 0) {
      lp += std::log(alpha / (alpha + t));
    } else {
      lp += std::log(count[b] / (alpha + t));
    }
    ++count[b];
  }
  return lp;
}

void check_full(const Partition& z, int n) {
  if (z.universe() != n || z.covered() != n) {
    throw std::invalid_argument("reference log joint needs a full partition");
  }
}

}  // namespace

double reference_log_joint(const FeatureDataset& data, const ModelParams& params,
                           const Partition& z) {
  params.validate();
  check_full(z, data.num_observations());
  const double bp = params.beta_plus, bm = params.beta_minus;
  const double base = std::lgamma(bp) + std::lgamma(bm) - std::lgamma(bp + bm);
  double ll = 0;
  for (const Block& b : z.blocks()) {
    for (int f = 0; f < data.num_features(); ++f) {
      int np = 0;
      for (int j : b) np += data.value(f, j);
      const int nm = static_cast<int>(b.size()) - np;
      ll += std::lgamma(bp + np) + std::lgamma(bm + nm) -
            std::lgamma(bp + bm + b.size()) - base;
    }
  }
  return ll + crp_sequential(z, params.alpha);
}

double reference_log_joint(const NetworkDataset& data, const ModelParams& params,
                           const Partition& z) {
  params.validate();
  check_full(z, data.num_observations());
  const double bp = params.beta_plus, bm = params.beta_minus;
  const double base = std::lgamma(bp) + std::lgamma(bm) - std::lgamma(bp + bm);
  double ll = 0;
  const int k = z.num_blocks();
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      long long np = 0, dyads = 0;
      if (a == b) {
        const Block& blk = z.block(a);
        for (size_t x = 0; x < blk.size(); ++x) {
          for (size_t y = x + 1; y < blk.size(); ++y) {
            ++dyads;
            if (data.edge(blk[x], blk[y])) ++np;
          }
        }
      } else {
        for (int u : z.block(a)) {
          for (int v : z.block(b)) {
            ++dyads;
            if (data.edge(u, v)) ++np;
          }
        }
      }
      if (dyads == 0) continue;
      ll += std::lgamma(bp + np) + std::lgamma(bm + (dyads - np)) -
            std::lgamma(bp + bm + dyads) - base;
    }
  }
  return ll + crp_sequential(z, params.alpha);
}

}  // namespace blockmc
