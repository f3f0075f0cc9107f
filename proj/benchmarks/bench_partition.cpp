#include <benchmark/benchmark.h>

#include "blockmc/partition.hpp"
#include "blockmc/rng.hpp"

using namespace blockmc;

namespace {

Partition random_partition(int n, int max_blocks, Rng& rng) {
  std::vector<Block> blocks(max_blocks);
  for (int i = 0; i < n; ++i) blocks[rng.uniform_int(max_blocks)].push_back(i);
  std::vector<Block> kept;
  for (auto& b : blocks) {
    if (!b.empty()) kept.push_back(std::move(b));
  }
  return Partition(n, std::move(kept));
}

}  // namespace

static void BM_CoarsestCommonRefinement(benchmark::State& state) {
  Rng rng(3);
  Partition a = random_partition(1000, 30, rng);
  Partition b = random_partition(1000, 30, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(coarsest_common_refinement(a, b));
  }
}
BENCHMARK(BM_CoarsestCommonRefinement);

static void BM_CanonicalKey(benchmark::State& state) {
  Rng rng(3);
  Partition a = random_partition(1000, 30, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(canonical_key(a));
  }
}
BENCHMARK(BM_CanonicalKey);

BENCHMARK_MAIN();
