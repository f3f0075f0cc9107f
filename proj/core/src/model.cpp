#include "blockmc/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace blockmc {

void ModelParams::validate() const {
  if (!(alpha > 0) || !(beta_plus > 0) || !(beta_minus > 0)) {
    throw std::invalid_argument("model parameters must be strictly positive");
  }
}

FeatureDataset::FeatureDataset(int d, int n, std::vector<std::uint8_t> values)
    : d_(d), n_(n), a_(std::move(values)) {
  if (d <= 0 || n <= 0) throw std::invalid_argument("feature matrix must be non-empty");
  if (a_.size() != static_cast<size_t>(d) * n) {
    throw std::invalid_argument("feature matrix size mismatch");
  }
  for (auto v : a_) {
    if (v > 1) throw std::invalid_argument("feature entries must be 0 or 1");
  }
}

NetworkDataset::NetworkDataset(int n, const std::vector<std::pair<int, int>>& edges)
    : n_(n), adj_(static_cast<size_t>(n) * n, 0), nbr_(n) {
  if (n <= 0) throw std::invalid_argument("network must have at least one vertex");
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (u == v) continue;  // diagonal removed
    adj_[static_cast<size_t>(u) * n_ + v] = 1;
    adj_[static_cast<size_t>(v) * n_ + u] = 1;
  }
  for (int u = 0; u < n_; ++u) {
    for (int v = 0; v < n_; ++v) {
      if (adj_[static_cast<size_t>(u) * n_ + v]) nbr_[u].push_back(v);
    }
    m_ += degree(u);
  }
  m_ /= 2;
}

double crp_log_density(const Partition& z, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  const int n = z.universe();
  if (n < 1 || z.empty()) throw std::invalid_argument("crp density needs a non-empty partition");
  if (z.covered() != n) throw std::invalid_argument("crp density needs a full partition");
  double lp = std::lgamma(alpha) + z.num_blocks() * std::log(alpha) -
              std::lgamma(alpha + n);
  for (const Block& b : z.blocks()) lp += std::lgamma(static_cast<double>(b.size()));
  return lp;
}

CrpPrior::CrpPrior(double alpha, int n)
    : alpha_(alpha),
      log_alpha_(std::log(alpha)),
      lg_int_(0.0, n + 1),
      lg_alpha_(alpha, n + 1) {}

double CrpPrior::log_density(const std::vector<Block>& blocks, int n) const {
  double lp = lg_alpha_(0) + blocks.size() * log_alpha_ - lg_alpha_(n);
  for (const Block& b : blocks) lp += lg_int_(static_cast<int>(b.size()));
  return lp;
}

double CrpPrior::attach_delta(int target_size, int csize, int covered) const {
  double d = target_size > 0
                 ? lg_int_(target_size + csize) - lg_int_(target_size)
                 : log_alpha_ + lg_int_(csize);
  return d - (lg_alpha_(covered + csize) - lg_alpha_(covered));
}

// ---------------------------------------------------------------- mixture

MixtureModel::MixtureModel(FeatureDataset data, ModelParams params)
    : data_(std::move(data)), params_(params) {
  params_.validate();
  const int n = data_.num_observations();
  crp_ = CrpPrior(params_.alpha, n);
  lgp_ = LgammaTable(params_.beta_plus, n + 1);
  lgm_ = LgammaTable(params_.beta_minus, n + 1);
  lgs_ = LgammaTable(params_.beta_plus + params_.beta_minus, n + 1);
  c0_ = lgp_(0) + lgm_(0) - lgs_(0);
}

double MixtureModel::log_joint(const Partition& z) const {
  if (z.covered() != num_observations() || z.universe() != num_observations()) {
    throw std::invalid_argument("log_joint needs a full partition of the dataset");
  }
  return crp_.log_density(z.blocks(), num_observations()) + log_likelihood(z);
}

double MixtureModel::log_likelihood(const Partition& z) const {
  LikStats s = make_stats(z.blocks());
  const int d = data_.num_features();
  double ll = 0;
  for (size_t k = 0; k < s.size.size(); ++k) {
    for (int f = 0; f < d; ++f) ll += pair_term(s.pos[k][f], s.size[k]);
  }
  return ll;
}

MixtureModel::LikStats MixtureModel::make_stats(const std::vector<Block>& blocks) const {
  const int d = data_.num_features();
  LikStats s;
  s.size.reserve(blocks.size());
  s.pos.reserve(blocks.size());
  for (const Block& b : blocks) {
    s.size.push_back(static_cast<int>(b.size()));
    std::vector<int> p(d, 0);
    for (int j : b) {
      for (int f = 0; f < d; ++f) p[f] += data_.value(f, j);
    }
    s.pos.push_back(std::move(p));
  }
  return s;
}

void MixtureModel::prepare(MoveSet& m, const Block& c) const {
  const int d = data_.num_features();
  m.members = c;
  m.cs = static_cast<int>(c.size());
  m.cpos.assign(d, 0);
  for (int j : c) {
    for (int f = 0; f < d; ++f) m.cpos[f] += data_.value(f, j);
  }
}

double MixtureModel::attach_delta(const LikStats& s, const MoveSet& m, int target) const {
  const int d = data_.num_features();
  double delta = 0;
  if (target < 0) {
    for (int f = 0; f < d; ++f) delta += pair_term(m.cpos[f], m.cs);
  } else {
    const int sz = s.size[target];
    const auto& p = s.pos[target];
    for (int f = 0; f < d; ++f) {
      delta += pair_term(p[f] + m.cpos[f], sz + m.cs) - pair_term(p[f], sz);
    }
  }
  return delta;
}

void MixtureModel::apply_attach(LikStats& s, const MoveSet& m, int target) const {
  if (target < 0) {
    s.size.push_back(m.cs);
    s.pos.push_back(m.cpos);
  } else {
    s.size[target] += m.cs;
    const int d = data_.num_features();
    for (int f = 0; f < d; ++f) s.pos[target][f] += m.cpos[f];
  }
}

void MixtureModel::apply_detach(LikStats& s, const MoveSet& m, int source) const {
  s.size[source] -= m.cs;
  const int d = data_.num_features();
  for (int f = 0; f < d; ++f) s.pos[source][f] -= m.cpos[f];
  assert(s.size[source] > 0);
}

void MixtureModel::erase_block(LikStats& s, int k) const {
  s.size.erase(s.size.begin() + k);
  s.pos.erase(s.pos.begin() + k);
}

// -------------------------------------------------------------- relational

RelationalModel::RelationalModel(NetworkDataset data, ModelParams params)
    : data_(std::move(data)), params_(params) {
  params_.validate();
  const int n = data_.num_observations();
  const int max_d = n * (n - 1) / 2 + 1;
  crp_ = CrpPrior(params_.alpha, n);
  lgp_ = LgammaTable(params_.beta_plus, max_d);
  lgm_ = LgammaTable(params_.beta_minus, max_d);
  lgs_ = LgammaTable(params_.beta_plus + params_.beta_minus, max_d);
  c0_ = lgp_(0) + lgm_(0) - lgs_(0);
}

double RelationalModel::log_joint(const Partition& z) const {
  if (z.covered() != num_observations() || z.universe() != num_observations()) {
    throw std::invalid_argument("log_joint needs a full partition of the dataset");
  }
  return crp_.log_density(z.blocks(), num_observations()) + log_likelihood(z);
}

double RelationalModel::log_likelihood(const Partition& z) const {
  LikStats s = make_stats(z.blocks());
  const int k = static_cast<int>(s.size.size());
  double ll = 0;
  for (int a = 0; a < k; ++a) {
    ll += pair_term(s.e[a][a], within_dyads(s.size[a]));
    for (int b = a + 1; b < k; ++b) {
      ll += pair_term(s.e[a][b], static_cast<long long>(s.size[a]) * s.size[b]);
    }
  }
  return ll;
}

RelationalModel::LikStats RelationalModel::make_stats(const std::vector<Block>& blocks) const {
  const int k = static_cast<int>(blocks.size());
  LikStats s;
  s.size.resize(k);
  s.e.assign(k, std::vector<long long>(k, 0));
  std::vector<int> slot(num_observations(), -1);
  for (int a = 0; a < k; ++a) {
    s.size[a] = static_cast<int>(blocks[a].size());
    for (int x : blocks[a]) slot[x] = a;
  }
  data_.for_each_edge([&](int u, int v) {
    int a = slot[u], b = slot[v];
    if (a < 0 || b < 0) return;
    if (a == b) {
      s.e[a][a] += 1;
    } else {
      s.e[a][b] += 1;
      s.e[b][a] += 1;
    }
  });
  return s;
}

void RelationalModel::prepare(MoveSet& m, const Block& c) const {
  m.members = c;
  m.cs = static_cast<int>(c.size());
  m.e_in = 0;
  for (int u : c) {
    for (int v : data_.neighbors(u)) {
      if (v > u && std::binary_search(c.begin(), c.end(), v)) m.e_in += 1;
    }
  }
}

void RelationalModel::refresh(MoveSet& m, const std::vector<int>& slot, int num_blocks) const {
  m.eb.assign(num_blocks, 0);
  for (int u : m.members) {
    for (int v : data_.neighbors(u)) {
      int sl = slot[v];
      if (sl >= 0) m.eb[sl] += 1;
    }
  }
}

double RelationalModel::attach_delta(const LikStats& s, const MoveSet& m, int target) const {
  const int k = static_cast<int>(s.size.size());
  double delta = 0;
  if (target < 0) {
    for (int l = 0; l < k; ++l) {
      delta += pair_term(m.eb[l], static_cast<long long>(m.cs) * s.size[l]);
    }
    delta += pair_term(m.e_in, within_dyads(m.cs));
  } else {
    const long long st = s.size[target];
    for (int l = 0; l < k; ++l) {
      if (l == target) continue;
      const long long d0 = st * s.size[l];
      delta += pair_term(s.e[target][l] + m.eb[l], d0 + static_cast<long long>(m.cs) * s.size[l]) -
               pair_term(s.e[target][l], d0);
    }
    delta += pair_term(s.e[target][target] + m.eb[target] + m.e_in, within_dyads(st + m.cs)) -
             pair_term(s.e[target][target], within_dyads(st));
  }
  return delta;
}

void RelationalModel::apply_attach(LikStats& s, const MoveSet& m, int target) const {
  const int k = static_cast<int>(s.size.size());
  if (target < 0) {
    for (int l = 0; l < k; ++l) s.e[l].push_back(m.eb[l]);
    std::vector<long long> row(m.eb.begin(), m.eb.end());
    row.push_back(m.e_in);
    s.e.push_back(std::move(row));
    s.size.push_back(m.cs);
  } else {
    for (int l = 0; l < k; ++l) {
      if (l == target) continue;
      s.e[target][l] += m.eb[l];
      s.e[l][target] += m.eb[l];
    }
    s.e[target][target] += m.eb[target] + m.e_in;
    s.size[target] += m.cs;
  }
}

void RelationalModel::apply_detach(LikStats& s, const MoveSet& m, int source) const {
  const int k = static_cast<int>(s.size.size());
  for (int l = 0; l < k; ++l) {
    if (l == source) continue;
    s.e[source][l] -= m.eb[l];
    s.e[l][source] -= m.eb[l];
  }
  s.e[source][source] -= m.eb[source] + m.e_in;
  s.size[source] -= m.cs;
  assert(s.size[source] > 0);
}

void RelationalModel::erase_block(LikStats& s, int k) const {
  s.size.erase(s.size.begin() + k);
  s.e.erase(s.e.begin() + k);
  for (auto& row : s.e) row.erase(row.begin() + k);
}

}  // namespace blockmc
