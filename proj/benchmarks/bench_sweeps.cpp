#include <benchmark/benchmark.h>

#include "blockmc/datagen.hpp"
#include "blockmc/sweeps.hpp"

using namespace blockmc;

static void BM_GibbsSweepMixture(benchmark::State& state) {
  auto gen = generate_bmm(PlantedSpec{8}, 7);
  MixtureModel model(std::move(gen.data), ModelParams{});
  Rng rng(11);
  WorkingState<MixtureModel> ws(model, gen.truth);
  for (auto _ : state) {
    gibbs_full_sweep(ws, nullptr, rng);
  }
}
BENCHMARK(BM_GibbsSweepMixture);

static void BM_GibbsSweepRelational(benchmark::State& state) {
  auto gen = planted_network(4, 15, 0.3, 0.05, 7);
  RelationalModel model(std::move(gen.data), ModelParams{});
  Rng rng(11);
  WorkingState<RelationalModel> ws(model, gen.truth);
  for (auto _ : state) {
    gibbs_full_sweep(ws, nullptr, rng);
  }
}
BENCHMARK(BM_GibbsSweepRelational);

BENCHMARK_MAIN();
