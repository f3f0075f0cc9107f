#include <benchmark/benchmark.h>

#include "blockmc/datagen.hpp"
#include "blockmc/kernels.hpp"

using namespace blockmc;

namespace {

struct Fixture {
  GeneratedNetwork gen = planted_network(4, 15, 0.3, 0.05, 7);
  RelationalModel model{NetworkDataset(gen.data), ModelParams{}};
  Partition za = gen.truth;
  Partition zb;
  Rng rng{11};

  Fixture() {
    // A context that splits the first planted block in two.
    std::vector<Block> blocks;
    Block lo, hi;
    for (int v = 0; v < 15; ++v) (v < 8 ? lo : hi).push_back(v);
    blocks.push_back(lo);
    blocks.push_back(hi);
    for (int b = 1; b < 4; ++b) blocks.push_back(za.block(b));
    zb = Partition(60, blocks);
  }
};

}  // namespace

static void BM_SmPropose(benchmark::State& state) {
  Fixture f;
  for (auto _ : state) {
    auto [i, j] = f.rng.distinct_pair(60);
    benchmark::DoNotOptimize(sm_propose(f.model, f.za, i, j, 5, Ordering{}, f.rng));
  }
}
BENCHMARK(BM_SmPropose);

static void BM_SrmPropose(benchmark::State& state) {
  Fixture f;
  for (auto _ : state) {
    auto [i, j] = f.rng.distinct_pair(60);
    benchmark::DoNotOptimize(srm_propose(f.model, f.za, i, j, Ordering{}, f.rng));
  }
}
BENCHMARK(BM_SrmPropose);

static void BM_ArmPropose(benchmark::State& state) {
  Fixture f;
  ProposalContext ctx(0, 10, f.za, f.zb);
  for (auto _ : state) {
    benchmark::DoNotOptimize(arm_propose(f.model, f.za, ctx, Ordering{}, f.rng));
  }
}
BENCHMARK(BM_ArmPropose);

BENCHMARK_MAIN();
