// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Tolerances are fixed here, not tuned at runtime.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "blockmc/cli.hpp"
#include "blockmc/datagen.hpp"
#include "blockmc/diagnostics.hpp"
#include "blockmc/ensemble.hpp"
#include "blockmc/oracle.hpp"
#include "helpers.hpp"

using namespace blockmc;
using namespace blockmc::testing;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  const char* name;
  bool ok = true;

  void expect(bool cond, const char* what) {
    if (!cond) {
      ok = false;
      std::printf("  criterion %d violated: %s\n", id, what);
    }
    CHECK_MESSAGE(cond, what);
  }

  ~Criterion() {
    std::printf("[criterion %d] %-58s %s\n", id, name, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
  }
};

}  // namespace

TEST_CASE("criterion 1: exact-frequency reproduction on the 4-vertex problem") {
  Criterion c{1, "exact frequencies (gibbs, sm, arm), TV < 0.02"};
  for (const char* sampler : {"gibbs", "sm", "arm"}) {
    VerifyExactOptions opts;
    opts.sampler = sampler;
    opts.iterations = 160000;
    opts.chains = 8;
    opts.seed = 20240901;
    VerifyExactSummary sum = run_verify_exact(opts);
    std::printf("  %-5s total variation %.5f\n", sampler, sum.total_variation);
    c.expect(sum.total_variation < 0.02, sampler);
  }
}

TEST_CASE("criterion 2: crp normalization over all partitions") {
  Criterion c{2, "sum exp(crp_log_density) = 1 +- 1e-10, n in 1..8"};
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (int n = 1; n <= 8; ++n) {
      double total = 0;
      for (const Partition& z : enumerate_partitions(n)) {
        total += std::exp(crp_log_density(z, alpha));
      }
      c.expect(std::abs(total - 1.0) <= 1e-10, "normalization");
    }
  }
}

TEST_CASE("criterion 3: incremental deltas equal full recomputation") {
  Criterion c{3, "1000 joint reassignments per model, |delta - full| <= 1e-9"};
  MixtureModel mm = small_mixture_model(40, 6, 1001);
  RelationalModel rm = small_relational_model(40, 1002);
  auto run = [&](const auto& model, std::uint64_t seed) {
    Rng rng(seed);
    const int n = model.num_observations();
    for (int rep = 0; rep < 1000; ++rep) {
      Partition z = random_partition(n, 1 + rng.uniform_int(6), rng);
      const int src = rng.uniform_int(z.num_blocks());
      const Block& from = z.block(src);
      Block cset;
      for (int x : from) {
        if (rng.uniform01() < 0.5) cset.push_back(x);
      }
      if (cset.empty()) {
        cset.push_back(from[rng.uniform_int(static_cast<int>(from.size()))]);
      }
      const int target =
          rng.uniform01() < 0.25 ? kNewBlock : rng.uniform_int(z.num_blocks());
      const double delta = delta_log_joint(model, z, cset, target);

      Partition removed = remove_set(z, cset);
      int rep_obs = -1;
      if (target != kNewBlock) {
        for (int x : z.block(target)) {
          if (!std::binary_search(cset.begin(), cset.end(), x)) {
            rep_obs = x;
            break;
          }
        }
      }
      Partition z2;
      if (rep_obs < 0) {
        z2 = concat(removed, Partition(n, {cset}));
      } else {
        std::vector<Block> blocks = removed.blocks();
        for (Block& b : blocks) {
          if (std::binary_search(b.begin(), b.end(), rep_obs)) {
            Block merged;
            std::merge(b.begin(), b.end(), cset.begin(), cset.end(),
                       std::back_inserter(merged));
            b = merged;
            break;
          }
        }
        z2 = Partition(n, std::move(blocks));
      }
      const double full = model.log_joint(z2) - model.log_joint(z);
      c.expect(std::abs(delta - full) <= 1e-9, "incremental/full mismatch");
    }
  };
  run(mm, 51);
  run(rm, 52);
}

namespace {

// Every (i,j) and, for the adaptive kernels, every context pair drawn from
// the full partition lattice of the instance size.
void enumerate_lattice(Criterion& c, int n) {
  Rng spot_rng(400 + n);
  std::vector<std::pair<int, int>> edge_pool = {
      {0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {0, 4}};
  std::vector<std::pair<int, int>> edges;
  for (auto [u, v] : edge_pool) {
    if (u < n && v < n) edges.emplace_back(u, v);
  }
  RelationalModel model(NetworkDataset(n, edges), ModelParams{});
  const auto all = enumerate_partitions(n);

  struct Job {
    SamplerKind kernel;
    const Partition* z;
    int i, j;
    const Partition* za;
    const Partition* zb;
  };
  std::vector<Job> jobs;
  for (const Partition& z : all) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        jobs.push_back({SamplerKind::kSrm, &z, i, j, nullptr, nullptr});
      }
    }
  }
  // context pairs, grouped by (i, j)
  std::vector<std::vector<int>> labels;
  labels.reserve(all.size());
  for (const Partition& z : all) labels.push_back(z.labels());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (size_t a = 0; a < all.size(); ++a) {
        if (labels[a][i] != labels[a][j]) continue;
        for (size_t b = 0; b < all.size(); ++b) {
          if (labels[b][i] == labels[b][j]) continue;
          for (const Partition& z : all) {
            jobs.push_back({SamplerKind::kSarm, &z, i, j, &all[a], &all[b]});
            jobs.push_back({SamplerKind::kArm, &z, i, j, &all[a], &all[b]});
          }
        }
      }
    }
  }

  std::atomic<size_t> next{0};
  std::atomic<int> failures{0};
  std::atomic<long long> leaves_total{0};
  const int workers =
      std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  auto worker = [&] {
    Rng rng(807 + n);
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      const Job& job = jobs[k];
      auto leaves = enumerate_kernel_paths(model, job.kernel, *job.z, job.i, job.j,
                                           job.za, job.zb, 0);
      leaves_total += static_cast<long long>(leaves.size());
      double total = 0;
      std::set<std::string> finals;
      bool bad = false;
      for (const PathLeaf& leaf : leaves) {
        total += std::exp(leaf.log_prob);
        if (std::abs(leaf.kernel_log_t - leaf.log_prob) > 1e-12) bad = true;
        if (!finals.insert(canonical_key(leaf.z_star)).second) bad = true;
      }
      if (std::abs(total - 1.0) > 1e-10) bad = true;
      // one stochastic run per instance must land on an enumerated leaf with
      // the same reported probability
      {
        KernelMode mode;
        mode.rng = &rng;
        double log_t = 0;
        Partition z_star;
        if (job.kernel == SamplerKind::kSrm) {
          ReconfigResult r = reconfig_run(model, *job.z, job.i, job.j, nullptr,
                                          nullptr, ReconfigVariant::kSrm,
                                          Ordering{}, mode);
          log_t = r.log_t;
          z_star = std::move(r.z_star);
        } else {
          const ReconfigVariant var = job.kernel == SamplerKind::kSarm
                                          ? ReconfigVariant::kSarm
                                          : ReconfigVariant::kArm;
          ReconfigResult r = reconfig_run(model, *job.z, job.i, job.j, job.za,
                                          job.zb, var, Ordering{}, mode);
          log_t = r.log_t;
          z_star = std::move(r.z_star);
        }
        const std::string key = canonical_key(z_star);
        bool matched = false;
        for (const PathLeaf& leaf : leaves) {
          if (canonical_key(leaf.z_star) == key) {
            matched = std::abs(leaf.log_prob - log_t) <= 1e-12;
            break;
          }
        }
        if (!matched) bad = true;
      }
      if (bad) failures.fetch_add(1);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  std::printf("  n=%d: %zu instances, %lld leaves\n", n, jobs.size(),
              leaves_total.load());
  c.expect(failures.load() == 0, "path uniqueness / normalization");
}

}  // namespace

TEST_CASE("criterion 4: path uniqueness and proposal normalization") {
  Criterion c{4, "srm/sarm/arm branch enumeration on n <= 5"};
  for (int n = 2; n <= 5; ++n) enumerate_lattice(c, n);
}

TEST_CASE("criterion 5: forced replay consistency") {
  Criterion c{5, "10000 proposals replay exactly and reverse to the origin"};
  MixtureModel mm = small_mixture_model(14, 4, 2001);
  RelationalModel rm = small_relational_model(14, 2002);
  std::atomic<int> done{0};
  std::atomic<int> failures{0};

  auto run = [&](const auto& model, std::uint64_t seed, int count) {
    Rng rng(seed);
    const int n = model.num_observations();
    int produced = 0;
    while (produced < count) {
      Partition z = random_partition(n, 4, rng);
      Partition a = random_partition(n, 3, rng);
      Partition b = random_partition(n, 5, rng);
      auto la = a.labels(), lb = b.labels();
      std::vector<std::pair<int, int>> dis;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if ((la[i] == la[j]) != (lb[i] == lb[j])) dis.emplace_back(i, j);
        }
      }
      if (dis.empty()) continue;
      auto [i, j] = dis[rng.uniform_int(static_cast<int>(dis.size()))];
      const int which = produced % 3;
      const ReconfigVariant var = which == 0   ? ReconfigVariant::kSrm
                                  : which == 1 ? ReconfigVariant::kSarm
                                               : ReconfigVariant::kArm;
      const Partition* za = var == ReconfigVariant::kSrm ? nullptr : &a;
      const Partition* zb = var == ReconfigVariant::kSrm ? nullptr : &b;
      KernelMode mode;
      mode.rng = &rng;
      ReconfigResult fwd = reconfig_run(model, z, i, j, za, zb, var, Ordering{}, mode);
      ReplayResult replay =
          reconfig_replay(model, z, i, j, za, zb, var, Ordering{}, fwd.z_star);
      if (!replay.reachable || replay.log_t != fwd.log_t) failures.fetch_add(1);
      ReplayResult rev =
          reconfig_replay(model, fwd.z_star, i, j, za, zb, var, Ordering{}, z);
      if (!rev.reachable || !std::isfinite(rev.log_t)) failures.fetch_add(1);
      ++produced;
      done.fetch_add(1);
    }
  };
  std::thread t1([&] { run(mm, 31, 5000); });
  std::thread t2([&] { run(rm, 32, 5000); });
  t1.join();
  t2.join();
  std::printf("  %d proposals checked\n", done.load());
  c.expect(done.load() == 10000, "volume");
  c.expect(failures.load() == 0, "replay mismatch");
}

TEST_CASE("criterion 6: autocorrelation ordering on the planted mixture") {
  Criterion c{6, "mean trace tau: arm < sm < gibbs on 10 seeds"};
  const int kSeeds = 10, kChains = 4, kIters = 500;
  double mean_tau[3] = {0, 0, 0};  // gibbs, sm, arm
  const SamplerKind kinds[3] = {SamplerKind::kGibbs, SamplerKind::kSm,
                                SamplerKind::kArm};

  std::atomic<int> next{0};
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const int task = next.fetch_add(1);
      if (task >= kSeeds * 3) return;
      const int seed_idx = task / 3;
      const int kind_idx = task % 3;
      GeneratedMixture g = generate_bmm(PlantedSpec{8}, 9000 + seed_idx);
      MixtureModel model(std::move(g.data), ModelParams{});
      RunConfig cfg;
      cfg.sampler = kinds[kind_idx];
      cfg.chains = kChains;
      cfg.iterations = kIters;
      cfg.seed = 700 + seed_idx;
      ChainEnsemble<MixtureModel> ens(model, cfg);
      std::vector<TraceRow> rows;
      std::vector<TimingRow> times;
      std::vector<std::vector<Partition>> states(kChains);
      for (int t = 0; t < kIters; ++t) {
        ens.step(rows, times, nullptr);
        for (int s = 0; s < kChains; ++s) {
          states[s].push_back(partition_from_text(rows[s].partition, 100));
        }
      }
      double tau = 0;
      for (int s = 0; s < kChains; ++s) {
        auto series = block_fraction_trace(states[s], 1);
        tau += autocorrelation_time(series).tau;
      }
      tau /= kChains;
      std::lock_guard<std::mutex> lk(mu);
      mean_tau[kind_idx] += tau / kSeeds;
    }
  };
  const int workers =
      std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::printf("  mean tau: gibbs %.2f, sm %.2f, arm %.2f\n", mean_tau[0],
              mean_tau[1], mean_tau[2]);
  c.expect(mean_tau[2] < mean_tau[1], "arm < sm");
  c.expect(mean_tau[1] < mean_tau[0], "sm < gibbs");
}

TEST_CASE("criterion 7: accept-rate ordering on a planted network") {
  Criterion c{7, "accept rates: sm < bsm < sarm < arm, sm-arm gap > 3x"};
  GeneratedNetwork g = planted_network(4, 15, 0.35, 0.08, 4242);
  RelationalModel model(NetworkDataset(g.data), ModelParams{});
  const SamplerKind kinds[4] = {SamplerKind::kSm, SamplerKind::kBsm,
                                SamplerKind::kSarm, SamplerKind::kArm};
  double rate[4] = {0, 0, 0, 0};
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= 4) return;
      RunConfig cfg;
      cfg.sampler = kinds[k];
      cfg.chains = 8;
      cfg.iterations = 700;  // 5600 proposals
      cfg.seed = 31337;
      ChainEnsemble<RelationalModel> ens(model, cfg);
      std::vector<TraceRow> rows;
      std::vector<TimingRow> times;
      long long proposals = 0, accepted = 0;
      for (int t = 0; t < cfg.iterations; ++t) {
        ens.step(rows, times, nullptr);
        for (const TraceRow& r : rows) {
          if (r.move == TraceMove::kSplit || r.move == TraceMove::kMerge) {
            ++proposals;
            accepted += r.accepted;
          }
        }
      }
      rate[k] = proposals > 0 ? 100.0 * accepted / proposals : 0.0;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < 2; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::printf("  accept x100: sm %.2f, bsm %.2f, sarm %.2f, arm %.2f\n", rate[0],
              rate[1], rate[2], rate[3]);
  c.expect(rate[0] < rate[1], "sm < bsm");
  c.expect(rate[1] < rate[2], "bsm < sarm");
  c.expect(rate[2] < rate[3], "sarm < arm");
  c.expect(rate[3] > 3.0 * rate[0], "sm-arm gap exceeds 3x");
}

TEST_CASE("criterion 8: diagnostics unit targets") {
  Criterion c{8, "ar(1) tau = 3 +- 0.3; iid-normal 4-restart rhat = 1 +- 0.02"};
  Rng rng(881);
  const double rho = 0.5;
  std::vector<double> x(1000000);
  double prev = 0;
  for (double& v : x) {
    const double u1 = rng.uniform01(), u2 = rng.uniform01();
    const double gauss =
        std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * M_PI * u2);
    prev = rho * prev + gauss;
    v = prev;
  }
  const double tau = autocorrelation_time(x).tau;
  std::printf("  ar(1) tau %.3f\n", tau);
  c.expect(std::abs(tau - 3.0) <= 0.3, "ar(1) integrated time");

  std::vector<std::vector<double>> restarts(4, std::vector<double>(10000));
  for (auto& s : restarts) {
    for (double& v : s) {
      const double u1 = rng.uniform01(), u2 = rng.uniform01();
      v = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * M_PI * u2);
    }
  }
  const double rhat = gelman_rubin(restarts).rhat;
  std::printf("  iid rhat %.4f\n", rhat);
  c.expect(std::abs(rhat - 1.0) <= 0.02, "iid-normal rhat");
}

TEST_CASE("criterion 9: byte-identical traces across thread counts") {
  Criterion c{9, "two runs, same seed, --threads 1 vs 4: identical traces"};
  const fs::path dir = "/tmp/blockmc_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream net(dir / "net.txt");
    net << "1 2\n1 3\n1 4\n3 4\n";
  }
  RunOptions opts;
  opts.sampler = "arm";
  opts.model = "irm";
  opts.data = (dir / "net.txt").string();
  opts.chains = 8;
  opts.iterations = 120;
  opts.restarts = 2;
  opts.seed = 5150;
  opts.threads = 1;
  opts.out = (dir / "one").string();
  cmd_run(opts);
  opts.threads = 4;
  opts.out = (dir / "four").string();
  cmd_run(opts);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  for (int r = 0; r < 2; ++r) {
    for (int s = 0; s < 8; ++s) {
      char name[64];
      std::snprintf(name, sizeof name, "r%02d/trace_c%02d.csv", r, s);
      const std::string a = slurp(dir / "one" / name);
      const std::string b = slurp(dir / "four" / name);
      c.expect(!a.empty() && a == b, name);
    }
  }
  fs::remove_all(dir);
}
