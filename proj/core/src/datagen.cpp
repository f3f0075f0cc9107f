#include "blockmc/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "blockmc/errors.hpp"
#include "blockmc/rng.hpp"

namespace blockmc {

namespace {

constexpr int kComponents = 5;
constexpr int kPerComponent = 20;

constexpr double kTable[kComponents][6] = {
    {.95, .95, .95, .95, .95, .95},
    {.05, .05, .05, .05, .95, .95},
    {.95, .05, .05, .95, .95, .95},
    {.05, .05, .05, .05, .05, .05},
    {.95, .95, .95, .95, .05, .05},
};

}  // namespace

GeneratedMixture generate_bmm(const PlantedSpec& spec, std::uint64_t seed) {
  if (spec.d != 6 && spec.d != 8 && spec.d != 10) {
    throw UsageError("feature count must be 6, 8 or 10");
  }
  const int n = kComponents * kPerComponent;
  Rng rng(seed);
  std::vector<std::uint8_t> a(static_cast<size_t>(spec.d) * n);
  for (int f = 0; f < spec.d; ++f) {
    const int col = std::min(f, 5);
    for (int j = 0; j < n; ++j) {
      const int k = j / kPerComponent;
      a[static_cast<size_t>(f) * n + j] = rng.uniform01() < kTable[k][col] ? 1 : 0;
    }
  }
  std::vector<Block> truth(kComponents);
  for (int j = 0; j < n; ++j) truth[j / kPerComponent].push_back(j);
  return {FeatureDataset(spec.d, n, std::move(a)), Partition(n, std::move(truth))};
}

FeatureDataset load_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature csv: " + path);
  std::vector<std::vector<std::uint8_t>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::uint8_t> row;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      if (cell == "0") {
        row.push_back(0);
      } else if (cell == "1") {
        row.push_back(1);
      } else {
        throw DataError("feature csv entries must be 0 or 1: " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError("ragged feature csv: " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty feature csv: " + path);
  const int d = static_cast<int>(rows.size());
  const int n = static_cast<int>(rows.front().size());
  std::vector<std::uint8_t> a(static_cast<size_t>(d) * n);
  for (int f = 0; f < d; ++f) {
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(f) * n + j] = rows[f][j];
  }
  return FeatureDataset(d, n, std::move(a));
}

void write_feature_csv(const FeatureDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  for (int f = 0; f < data.num_features(); ++f) {
    for (int j = 0; j < data.num_observations(); ++j) {
      if (j) out << ',';
      out << data.value(f, j);
    }
    out << '\n';
  }
}

NetworkDataset load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list: " + path);
  std::vector<std::pair<int, int>> edges;
  int max_index = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::stringstream ss(line);
    long long u, v;
    if (!(ss >> u)) continue;  // blank line
    if (!(ss >> v)) throw DataError(path + ":" + std::to_string(lineno) + ": expected two vertex indices");
    std::string extra;
    if (ss >> extra) throw DataError(path + ":" + std::to_string(lineno) + ": trailing data");
    if (u < 1 || v < 1 || u > 1'000'000 || v > 1'000'000) {
      throw DataError(path + ":" + std::to_string(lineno) + ": vertex index out of range");
    }
    edges.emplace_back(static_cast<int>(u - 1), static_cast<int>(v - 1));
    max_index = std::max(max_index, static_cast<int>(std::max(u, v)));
  }
  if (edges.empty()) throw DataError("edge list has no edges: " + path);
  return NetworkDataset(max_index, edges);
}

NetworkDataset downsample(const NetworkDataset& net, int m) {
  const int n = net.num_observations();
  if (m < 1 || m > n) throw UsageError("downsample size out of range");
  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (net.degree(a) != net.degree(b)) return net.degree(a) > net.degree(b);
    return a > b;
  });
  std::vector<int> keep(order.begin(), order.begin() + m);
  std::sort(keep.begin(), keep.end());
  std::vector<int> new_id(n, -1);
  for (int k = 0; k < m; ++k) new_id[keep[k]] = k;
  std::vector<std::pair<int, int>> edges;
  net.for_each_edge([&](int u, int v) {
    if (new_id[u] >= 0 && new_id[v] >= 0) edges.emplace_back(new_id[u], new_id[v]);
  });
  return NetworkDataset(m, edges);
}

NetworkDataset verification_network() {
  return NetworkDataset(4, {{0, 1}, {0, 2}, {0, 3}, {2, 3}});
}

GeneratedNetwork planted_network(int num_blocks, int block_size, double p_in,
                                 double p_out, std::uint64_t seed) {
  if (num_blocks < 1 || block_size < 1) throw UsageError("invalid planted layout");
  if (p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1) {
    throw UsageError("edge probabilities must be in [0,1]");
  }
  const int n = num_blocks * block_size;
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double p = (u / block_size == v / block_size) ? p_in : p_out;
      if (rng.uniform01() < p) edges.emplace_back(u, v);
    }
  }
  std::vector<Block> truth(num_blocks);
  for (int v = 0; v < n; ++v) truth[v / block_size].push_back(v);
  return {NetworkDataset(n, edges), Partition(n, std::move(truth))};
}

}  // namespace blockmc
