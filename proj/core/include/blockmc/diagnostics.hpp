// Convergence and efficiency statistics computed from trace series.
#ifndef BLOCKMC_DIAGNOSTICS_HPP
#define BLOCKMC_DIAGNOSTICS_HPP

#include <span>
#include <utility>
#include <vector>

#include "blockmc/partition.hpp"

namespace blockmc {

struct AutocorrelationResult {
  double tau = 1.0;
  bool degenerate = false;  // constant series
};

// Integrated autocorrelation time 1 + 2 sum_{t=1..m} r(t), truncated before
// the first non-positive sample autocorrelation. Series must have at least
// 10 entries.
AutocorrelationResult autocorrelation_time(std::span<const double> series);

struct GelmanRubinResult {
  double rhat = 1.0;
  bool degenerate = false;  // zero within-chain variance
};

// Classic potential scale reduction factor across restarts. The first half of
// every series is discarded as burn-in; at least 4 post-burn-in samples per
// restart are required.
GelmanRubinResult gelman_rubin(const std::vector<std::vector<double>>& restarts);

// Fraction of observations in the `rank` largest blocks (cumulative).
std::vector<double> block_fraction_trace(std::span<const Partition> states, int rank);

// 1 when i and j share a block, else 0.
std::vector<double> indicator_series(std::span<const Partition> states, int i, int j);

// Maximum integrated autocorrelation time of the co-clustering indicator over
// a set of observation pairs.
double max_indicator_autocorrelation(std::span<const Partition> states,
                                     std::span<const std::pair<int, int>> pairs);

// Computational effort in units of full Gibbs sweeps:
//   iterations * (kernel_time + gibbs_time) / gibbs_time.
double standardized_iterations(double kernel_time, double gibbs_time,
                               double iterations);

}  // namespace blockmc

#endif
