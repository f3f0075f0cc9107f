#include "blockmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blockmc {

AutocorrelationResult autocorrelation_time(std::span<const double> x) {
  const size_t n = x.size();
  if (n < 10) throw std::invalid_argument("series too short for autocorrelation time");
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 <= 0) return {1.0, true};
  double tau = 1.0;
  for (size_t lag = 1; lag < n; ++lag) {
    double c = 0;
    for (size_t t = 0; t + lag < n; ++t) c += (x[t] - mean) * (x[t + lag] - mean);
    c /= static_cast<double>(n);
    const double r = c / c0;
    if (r <= 0) break;
    tau += 2.0 * r;
  }
  return {tau, false};
}

GelmanRubinResult gelman_rubin(const std::vector<std::vector<double>>& restarts) {
  const size_t m = restarts.size();
  if (m < 2) throw std::invalid_argument("Gelman-Rubin needs at least two restarts");
  size_t n = std::numeric_limits<size_t>::max();
  for (const auto& s : restarts) n = std::min(n, s.size() - s.size() / 2);
  if (n < 4) throw std::invalid_argument("Gelman-Rubin needs at least 4 post-burn-in samples");

  std::vector<double> means(m), vars(m);
  for (size_t c = 0; c < m; ++c) {
    const auto& s = restarts[c];
    const size_t start = s.size() / 2;
    double mu = 0;
    for (size_t t = 0; t < n; ++t) mu += s[start + t];
    mu /= static_cast<double>(n);
    double v = 0;
    for (size_t t = 0; t < n; ++t) v += (s[start + t] - mu) * (s[start + t] - mu);
    v /= static_cast<double>(n - 1);
    means[c] = mu;
    vars[c] = v;
  }
  double w = 0;
  for (double v : vars) w += v;
  w /= static_cast<double>(m);
  double grand = 0;
  for (double mu : means) grand += mu;
  grand /= static_cast<double>(m);
  double b = 0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= static_cast<double>(n) / static_cast<double>(m - 1);

  const double nn = static_cast<double>(n);
  if (w <= 0) {
    if (b <= 0) return {1.0, true};
    return {std::numeric_limits<double>::infinity(), true};
  }
  const double v_hat = (nn - 1) / nn * w + b / nn;
  return {std::sqrt(v_hat / w), false};
}

std::vector<double> block_fraction_trace(std::span<const Partition> states, int rank) {
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  std::vector<double> out;
  out.reserve(states.size());
  std::vector<int> sizes;
  for (const Partition& z : states) {
    sizes.clear();
    for (const Block& b : z.blocks()) sizes.push_back(static_cast<int>(b.size()));
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    int top = 0;
    for (int k = 0; k < std::min<int>(rank, sizes.size()); ++k) top += sizes[k];
    out.push_back(static_cast<double>(top) / static_cast<double>(z.covered()));
  }
  return out;
}

std::vector<double> indicator_series(std::span<const Partition> states, int i, int j) {
  if (i == j) throw std::invalid_argument("indicator needs distinct observations");
  std::vector<double> out;
  out.reserve(states.size());
  for (const Partition& z : states) {
    const int bi = z.block_index_of(i), bj = z.block_index_of(j);
    if (bi < 0 || bj < 0) throw std::invalid_argument("indicator observation not covered");
    out.push_back(bi == bj ? 1.0 : 0.0);
  }
  return out;
}

double max_indicator_autocorrelation(std::span<const Partition> states,
                                     std::span<const std::pair<int, int>> pairs) {
  double mx = 0;
  for (auto [i, j] : pairs) {
    auto series = indicator_series(states, i, j);
    mx = std::max(mx, autocorrelation_time(series).tau);
  }
  return mx;
}

double standardized_iterations(double kernel_time, double gibbs_time,
                               double iterations) {
  if (!(gibbs_time > 0)) throw std::invalid_argument("Gibbs time must be positive");
  if (kernel_time < 0) throw std::invalid_argument("negative kernel time");
  return iterations * (kernel_time + gibbs_time) / gibbs_time;
}

}  // namespace blockmc
