#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "blockmc/oracle.hpp"
#include "blockmc/sweeps.hpp"
#include "helpers.hpp"

using namespace blockmc;
using namespace blockmc::testing;

TEST_CASE("a single candidate is chosen with probability one") {
  RelationalModel model = fig3_model();
  Partition z = make_partition(4, {{0, 1}, {2, 3}});
  Rng rng(1);
  SweepResult r = restricted_sweep(model, z, {1}, {z.block(0)}, rng);
  CHECK(r.prob == doctest::Approx(1.0));
  CHECK(r.num_candidates == 1);
  CHECK(r.z_star.set_equal(z));
}

TEST_CASE("uniform model weights candidates equally") {
  UniformModel model(6);
  Partition z = make_partition(6, {{0, 1}, {2, 3}, {4, 5}});
  std::vector<Block> cands = {z.block(0), z.block(1), z.block(2)};
  for (int k = 0; k < 3; ++k) {
    SweepResult r = forced_sweep(model, z, {1}, cands, k);
    CHECK(r.prob == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("forced probabilities sum to one over the candidate list") {
  RelationalModel model = small_relational_model(8, 5);
  Partition z = make_partition(8, {{0, 1, 2}, {3, 4}, {5, 6, 7}});
  std::vector<Block> cands = {z.block(0), z.block(1), z.block(2), {}};
  double total = 0;
  for (int k = 0; k < 4; ++k) {
    total += forced_sweep(model, z, {1, 2}, cands, k).prob;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("restricted sweep weights match brute-force evaluation") {
  RelationalModel model = fig3_model();
  Partition z = Partition::singletons(4);
  // move observation 1 (the paper's vertex 2); candidates: every other block
  // plus a fresh one
  std::vector<Block> cands = {{0}, {2}, {3}, {}};
  std::vector<double> logq;
  // outcomes via direct construction
  std::vector<Partition> outcomes = {
      make_partition(4, {{0, 1}, {2}, {3}}),
      make_partition(4, {{0}, {1, 2}, {3}}),
      make_partition(4, {{0}, {2}, {1, 3}}),
      Partition::singletons(4),
  };
  for (const Partition& o : outcomes) logq.push_back(model.log_joint(o));
  const double lse = log_sum_exp(logq);
  for (int k = 0; k < 4; ++k) {
    SweepResult r = forced_sweep(model, z, {1}, cands, k);
    CHECK(r.prob == doctest::Approx(std::exp(logq[k] - lse)).epsilon(1e-12));
    CHECK(r.z_star.set_equal(outcomes[k]));
  }
}

TEST_CASE("restricted sweep validates inputs") {
  RelationalModel model = fig3_model();
  Partition z = make_partition(4, {{0, 1}, {2, 3}});
  Rng rng(2);
  CHECK_THROWS_AS(restricted_sweep(model, z, {1, 2}, {z.block(0)}, rng),
                  std::invalid_argument);  // straddles two blocks
  CHECK_THROWS_AS(restricted_sweep(model, z, {1}, {}, rng), std::invalid_argument);
  CHECK_THROWS_AS(restricted_sweep(model, z, {1}, {Block{0, 2}}, rng),
                  std::invalid_argument);  // not a block of z
  CHECK_THROWS_AS(restricted_sweep(model, z, {1}, {z.block(0), z.block(0)}, rng),
                  std::invalid_argument);  // duplicate
}

TEST_CASE("restricted and forced sweeps agree on the realized outcome") {
  RelationalModel model = small_relational_model(10, 7);
  Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    Partition z = random_partition(10, 4, rng);
    int src = rng.uniform_int(z.num_blocks());
    Block c{z.block(src)[rng.uniform_int(static_cast<int>(z.block(src).size()))]};
    std::vector<Block> cands;
    for (const Block& b : z.blocks()) cands.push_back(b);
    cands.push_back({});
    SweepResult a = restricted_sweep(model, z, c, cands, rng);
    SweepResult b = forced_sweep(model, z, c, cands, a.chosen);
    CHECK(a.prob == b.prob);  // identical arithmetic, bitwise equal
    CHECK(a.z_star.set_equal(b.z_star));
  }
}

TEST_CASE("full sweep on a single observation is a point mass") {
  UniformModel model(1);
  Partition z = Partition::one_block(1);
  Rng rng(3);
  SweepResult r = full_sweep_step(model, z, {0}, rng);
  CHECK(r.num_candidates == 1);
  CHECK(r.prob == doctest::Approx(1.0));
  CHECK(r.z_star.set_equal(z));
}

TEST_CASE("full sweep deduplicates the fresh-block outcome") {
  // constant q, three singletons: moving one gives exactly three outcomes
  UniformModel model(3);
  Partition z = Partition::singletons(3);
  Rng rng(4);
  SweepResult r = full_sweep_step(model, z, {2}, rng);
  CHECK(r.num_candidates == 3);
  CHECK(r.prob == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("full sweep matches the exact conditional") {
  RelationalModel model = fig3_model();
  Partition z = make_partition(4, {{0, 1}, {2, 3}});
  const int h = 3;
  // every full partition agreeing with z off h
  std::vector<Partition> outcomes = {
      make_partition(4, {{0, 1, 3}, {2}}),
      make_partition(4, {{0, 1}, {2, 3}}),
      make_partition(4, {{0, 1}, {2}, {3}}),
  };
  std::vector<double> logq;
  for (const Partition& o : outcomes) logq.push_back(model.log_joint(o));
  const double lse = log_sum_exp(logq);

  // estimate the realized distribution through repeated single draws
  std::map<std::string, int> counts;
  Rng rng(11);
  const int reps = 200000;
  for (int rep = 0; rep < reps; ++rep) {
    SweepResult r = full_sweep_step(model, z, {h}, rng);
    ++counts[canonical_key(r.z_star)];
  }
  for (size_t k = 0; k < outcomes.size(); ++k) {
    const double expect = std::exp(logq[k] - lse);
    const double got = counts[canonical_key(outcomes[k])] / double(reps);
    CHECK(got == doctest::Approx(expect).epsilon(0.05));
  }
}

TEST_CASE("weights survive extreme log ranges") {
  ExtremeModel model(4);
  Partition z = make_partition(4, {{0, 1}, {2, 3}});
  Rng rng(5);
  SweepResult r = full_sweep_step(model, z, {1}, rng);
  CHECK(std::isfinite(r.prob));
  CHECK(r.prob > 0.0);
  CHECK(r.prob <= 1.0);
}

TEST_CASE("gibbs full sweep keeps a valid full partition") {
  RelationalModel model = small_relational_model(12, 19);
  Rng rng(6);
  WorkingState<RelationalModel> ws(model, Partition::singletons(12));
  for (int it = 0; it < 25; ++it) gibbs_full_sweep(ws, nullptr, rng);
  Partition z = ws.snapshot();
  CHECK(z.covered() == 12);
  CHECK(std::abs(model.log_joint(z) - (model.log_joint(Partition::singletons(12)) +
                                       ws.offset())) <= 1e-8);
}
