// Synthetic data generators and dataset ingestion.
#ifndef BLOCKMC_DATAGEN_HPP
#define BLOCKMC_DATAGEN_HPP

#include <cstdint>
#include <string>

#include "blockmc/model.hpp"

namespace blockmc {

// Planted Bernoulli mixture: 5 components of 20 observations each, component
// feature probabilities from a fixed 5 x 6 table; for d > 6 the last table
// column is repeated. d must be 6, 8 or 10.
struct PlantedSpec {
  int d = 6;
};

struct GeneratedMixture {
  FeatureDataset data;
  Partition truth;
};

GeneratedMixture generate_bmm(const PlantedSpec& spec, std::uint64_t seed);

FeatureDataset load_feature_csv(const std::string& path);
void write_feature_csv(const FeatureDataset& data, const std::string& path);

// Edge list of 1-based "u v" pairs, '#' comments allowed. The loader
// symmetrizes, thresholds at zero and drops the diagonal.
NetworkDataset load_network(const std::string& path);

// Keeps the m vertices that come first under (degree descending, original
// label descending), then relabels the retained vertices in original index
// order.
NetworkDataset downsample(const NetworkDataset& net, int m);

// The 4-vertex network used by the exact-frequency verification command.
NetworkDataset verification_network();

struct GeneratedNetwork {
  NetworkDataset data;
  Partition truth;
};

// Planted block structure: within-block edges with probability p_in, between
// blocks with probability p_out.
GeneratedNetwork planted_network(int num_blocks, int block_size, double p_in,
                                 double p_out, std::uint64_t seed);

}  // namespace blockmc

#endif
