#include "blockmc/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <variant>

#include <json.hpp>

#include "blockmc/datagen.hpp"
#include "blockmc/diagnostics.hpp"
#include "blockmc/ensemble.hpp"
#include "blockmc/errors.hpp"
#include "blockmc/oracle.hpp"
#include "blockmc/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace blockmc {

const char kVersion[] = "0.1.0";

namespace {

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot hash file: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string chain_file(const std::string& prefix, int chain) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_c%02d.csv", prefix.c_str(), chain);
  return buf;
}

std::string restart_dir(int r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "r%02d", r);
  return buf;
}

int resolve_threads(int requested, int chains) {
  if (requested > 0) return requested;
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, std::min(chains, hw > 0 ? hw : 1));
}

template <class Model>
json run_restarts(const Model& model, const RunOptions& opts) {
  RunConfig base;
  try {
    base.sampler = sampler_from_string(opts.sampler);
    base.chains = opts.chains;
    base.iterations = opts.iterations;
    base.burn_in = opts.burn_in;
    base.params = opts.params;
    base.sm_sweeps = opts.sm_sweeps;
    base.restarts = opts.restarts;
    base.threads = opts.threads;
    base.warmup_sweeps = opts.warmup;
    base.interlace = opts.interlace;
    base.seed = opts.seed;
    base.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  ThreadPool pool(resolve_threads(opts.threads, opts.chains));
  json traces = json::array();
  json seeds = json::array();
  for (int r = 0; r < opts.restarts; ++r) {
    RunConfig cfg = base;
    cfg.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(r));
    seeds.push_back(cfg.seed);
    const fs::path dir = fs::path(opts.out) / restart_dir(r);
    fs::create_directories(dir);
    std::vector<std::unique_ptr<TraceWriter>> tw;
    std::vector<std::unique_ptr<TimingWriter>> mw;
    for (int s = 0; s < opts.chains; ++s) {
      const std::string tpath = (dir / chain_file("trace", s)).string();
      const std::string mpath = (dir / chain_file("timing", s)).string();
      tw.push_back(std::make_unique<TraceWriter>(tpath));
      mw.push_back(std::make_unique<TimingWriter>(mpath));
      json entry;
      entry["restart"] = r;
      entry["chain"] = s;
      entry["trace"] = (fs::path(restart_dir(r)) / chain_file("trace", s)).string();
      entry["timings"] = (fs::path(restart_dir(r)) / chain_file("timing", s)).string();
      traces.push_back(entry);
    }
    ChainEnsemble<Model> ens(model, cfg);
    std::vector<TraceRow> rows;
    std::vector<TimingRow> times;
    for (int t = 0; t < opts.iterations; ++t) {
      ens.step(rows, times, &pool);
      for (int s = 0; s < opts.chains; ++s) {
        tw[s]->write(rows[s]);
        mw[s]->write(times[s]);
      }
    }
  }
  json out;
  out["restart_seeds"] = seeds;
  out["traces"] = traces;
  return out;
}

}  // namespace

int cmd_generate(const GenerateOptions& opts) {
  if (opts.model != "bmm") throw UsageError("only the bmm generator is available");
  if (opts.out.empty()) throw UsageError("--out is required");
  GeneratedMixture g = generate_bmm(PlantedSpec{opts.d}, opts.seed);
  if (fs::path(opts.out).has_parent_path()) {
    fs::create_directories(fs::path(opts.out).parent_path());
  }
  write_feature_csv(g.data, opts.out);
  std::ofstream sidecar(opts.out + ".planted");
  if (!sidecar) throw DataError("cannot open output file: " + opts.out + ".planted");
  sidecar << to_text(g.truth) << '\n';
  std::cout << "wrote " << opts.out << " (" << g.data.num_features() << "x"
            << g.data.num_observations() << ") and " << opts.out << ".planted\n";
  return 0;
}

int cmd_run(const RunOptions& opts) {
  if (opts.out.empty()) throw UsageError("--out is required");
  if (opts.model != "bmm" && opts.model != "irm") {
    throw UsageError("--model must be bmm or irm");
  }
  if (opts.data.empty()) throw UsageError("--data is required");
  if (opts.scale <= 0 || opts.scale > 1) throw UsageError("--scale must be in (0,1]");
  if (opts.model == "bmm" && opts.scale != 1.0) {
    throw UsageError("--scale only applies to network data");
  }
  try {
    opts.params.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto wall0 = std::chrono::steady_clock::now();
  fs::create_directories(opts.out);

  json mf;
  mf["version"] = kVersion;
  mf["command"] = "run";
  mf["sampler"] = opts.sampler;
  mf["model"] = opts.model;
  mf["data"] = opts.data;
  mf["data_fnv1a64"] = fnv1a64_file(opts.data);
  mf["chains"] = opts.chains;
  mf["iterations"] = opts.iterations;
  mf["restarts"] = opts.restarts;
  mf["seed"] = opts.seed;
  mf["scale"] = opts.scale;
  mf["sm_sweeps"] = opts.sm_sweeps;
  mf["burn_in"] = opts.burn_in;
  mf["warmup"] = opts.warmup;
  mf["interlace"] = opts.interlace;
  mf["alpha"] = opts.params.alpha;
  mf["beta_plus"] = opts.params.beta_plus;
  mf["beta_minus"] = opts.params.beta_minus;

  json run_info;
  if (opts.model == "bmm") {
    FeatureDataset data = load_feature_csv(opts.data);
    mf["n"] = data.num_observations();
    mf["d"] = data.num_features();
    MixtureModel model(std::move(data), opts.params);
    run_info = run_restarts(model, opts);
  } else {
    NetworkDataset net = load_network(opts.data);
    if (opts.scale < 1.0) {
      const int m = std::max(1, static_cast<int>(std::llround(opts.scale * net.num_observations())));
      net = downsample(net, m);
    }
    mf["n"] = net.num_observations();
    mf["edges"] = net.num_edges();
    RelationalModel model(std::move(net), opts.params);
    run_info = run_restarts(model, opts);
  }
  mf["restart_seeds"] = run_info["restart_seeds"];
  mf["traces"] = run_info["traces"];
  mf["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

  std::ofstream mfs(fs::path(opts.out) / "manifest.json");
  if (!mfs) throw DataError("cannot write manifest");
  mfs << mf.dump(2) << '\n';
  std::cout << "wrote " << (fs::path(opts.out) / "manifest.json").string() << '\n';
  return 0;
}

// ----------------------------------------------------------------- diagnose

namespace {

bool wildcard_match(const char* pat, const char* str) {
  if (*pat == '\0') return *str == '\0';
  if (*pat == '*') {
    for (const char* s = str;; ++s) {
      if (wildcard_match(pat + 1, s)) return true;
      if (*s == '\0') return false;
    }
  }
  if (*str == '\0') return false;
  if (*pat == '?' || *pat == *str) return wildcard_match(pat + 1, str + 1);
  return false;
}

}  // namespace

std::vector<std::string> glob_files(const std::string& pattern) {
  std::vector<std::string> segments;
  std::string cur;
  for (char c : pattern) {
    if (c == '/') {
      segments.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  segments.push_back(cur);

  std::vector<fs::path> frontier;
  size_t first = 0;
  if (!segments.empty() && segments[0].empty()) {
    frontier.push_back("/");
    first = 1;
  } else {
    frontier.push_back(".");
  }
  for (size_t si = first; si < segments.size(); ++si) {
    const std::string& seg = segments[si];
    if (seg.empty()) continue;
    std::vector<fs::path> next;
    const bool wild = seg.find_first_of("*?") != std::string::npos;
    for (const fs::path& base : frontier) {
      if (!wild) {
        fs::path p = base / seg;
        if (fs::exists(p)) next.push_back(p);
        continue;
      }
      if (!fs::is_directory(base)) continue;
      for (const auto& entry : fs::directory_iterator(base)) {
        const std::string name = entry.path().filename().string();
        if (wildcard_match(seg.c_str(), name.c_str())) next.push_back(entry.path());
      }
    }
    frontier = std::move(next);
  }
  std::vector<std::string> out;
  for (const auto& p : frontier) {
    if (fs::is_regular_file(p)) {
      std::string s = p.string();
      if (s.rfind("./", 0) == 0) s = s.substr(2);
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct ChainTrace {
  std::string path;
  std::vector<TraceRow> rows;
};

std::vector<std::pair<int, int>> load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pair file: " + path);
  std::vector<std::pair<int, int>> pairs;
  long long i, j;
  while (in >> i >> j) {
    if (i < 1 || j < 1) throw DataError("pair indices are 1-based");
    pairs.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
  }
  if (pairs.empty()) throw DataError("pair file has no pairs: " + path);
  return pairs;
}

int infer_universe(const std::vector<TraceRow>& rows) {
  // largest 1-based index in the partition text
  int n = 0;
  int cur = 0;
  for (char c : rows.front().partition) {
    if (c >= '0' && c <= '9') {
      cur = cur * 10 + (c - '0');
    } else {
      n = std::max(n, cur);
      cur = 0;
    }
  }
  return std::max(n, cur);
}

}  // namespace

int cmd_diagnose(const DiagnoseOptions& opts) {
  if (opts.traces.empty()) throw UsageError("--traces is required");
  if (opts.out.empty()) throw UsageError("--out is required");
  if (opts.quantity != "logjoint" && opts.quantity != "topfrac" &&
      opts.quantity != "indicator") {
    throw UsageError("--quantity must be logjoint, topfrac or indicator");
  }
  if (opts.quantity == "indicator" && opts.pairs.empty()) {
    throw UsageError("--pairs is required for the indicator quantity");
  }
  const auto files = glob_files(opts.traces);
  if (files.empty()) throw DataError("no trace files match " + opts.traces);

  std::vector<std::pair<int, int>> pairs;
  if (opts.quantity == "indicator") pairs = load_pairs(opts.pairs);

  // Group chain files by directory: one directory per restart.
  std::map<std::string, std::vector<ChainTrace>> restarts;
  for (const auto& f : files) {
    ChainTrace ct;
    ct.path = f;
    ct.rows = read_trace(f);
    if (ct.rows.empty()) throw DataError("empty trace: " + f);
    restarts[fs::path(f).parent_path().string()].push_back(std::move(ct));
  }

  struct RestartReport {
    std::string dir;
    double tau = 0;
    double accept_x100 = 0;
    double normalized_iterations = 0;
    bool have_normalized = false;
    std::vector<double> mean_series;  // per-iteration mean over chains
  };
  std::vector<RestartReport> reports;

  for (auto& [dir, chains] : restarts) {
    RestartReport rep;
    rep.dir = dir;
    double tau_sum = 0;
    long long proposals = 0, accepts = 0;
    std::int64_t kernel_ns = 0, gibbs_ns = 0;
    bool timings_ok = true;
    size_t iters = chains.front().rows.size();
    for (auto& ct : chains) iters = std::min(iters, ct.rows.size());
    std::vector<double> mean_series(iters, 0.0);

    for (auto& ct : chains) {
      std::vector<double> series;
      series.reserve(iters);
      if (opts.quantity == "logjoint") {
        for (size_t t = 0; t < iters; ++t) series.push_back(ct.rows[t].log_q);
      } else {
        const int n = infer_universe(ct.rows);
        std::vector<Partition> states;
        states.reserve(iters);
        for (size_t t = 0; t < iters; ++t) {
          states.push_back(partition_from_text(ct.rows[t].partition, n));
        }
        if (opts.quantity == "topfrac") {
          series = block_fraction_trace(states, 1);
        } else {
          // indicator: autocorrelation uses the max over pairs; the series
          // kept for the cross-restart statistic is the first pair's.
          tau_sum += max_indicator_autocorrelation(states, pairs);
          series = indicator_series(states, pairs.front().first, pairs.front().second);
        }
      }
      if (opts.quantity != "indicator") {
        tau_sum += autocorrelation_time(series).tau;
      }
      for (size_t t = 0; t < iters; ++t) mean_series[t] += series[t];
      for (const TraceRow& r : ct.rows) {
        if (r.move == TraceMove::kSplit || r.move == TraceMove::kMerge) {
          ++proposals;
          if (r.accepted) ++accepts;
        }
      }
      const std::string tpath = ct.path;
      std::string mpath = tpath;
      const auto at = mpath.rfind("trace_");
      if (at != std::string::npos) {
        mpath.replace(at, 6, "timing_");
        if (fs::exists(mpath)) {
          for (const TimingRow& m : read_timings(mpath)) {
            kernel_ns += m.kernel_ns;
            gibbs_ns += m.gibbs_ns;
          }
        } else {
          timings_ok = false;
        }
      } else {
        timings_ok = false;
      }
    }
    for (double& v : mean_series) v /= static_cast<double>(chains.size());
    rep.mean_series = std::move(mean_series);
    rep.tau = tau_sum / static_cast<double>(chains.size());
    rep.accept_x100 = proposals > 0 ? 100.0 * accepts / proposals : 0.0;
    if (timings_ok && gibbs_ns > 0) {
      rep.have_normalized = true;
      rep.normalized_iterations = standardized_iterations(
          static_cast<double>(kernel_ns), static_cast<double>(gibbs_ns),
          static_cast<double>(iters));
    }
    reports.push_back(std::move(rep));
  }

  json out;
  out["version"] = kVersion;
  out["quantity"] = opts.quantity;
  out["num_restarts"] = reports.size();
  double tau_mean = 0;
  json jr = json::array();
  for (size_t r = 0; r < reports.size(); ++r) {
    json o;
    o["restart"] = r;
    o["dir"] = reports[r].dir;
    o["autocorrelation_time"] = reports[r].tau;
    o["accept_rate_x100"] = reports[r].accept_x100;
    if (reports[r].have_normalized) {
      o["normalized_iterations"] = reports[r].normalized_iterations;
    }
    jr.push_back(o);
    tau_mean += reports[r].tau;
  }
  tau_mean /= static_cast<double>(reports.size());
  out["restarts"] = jr;
  out["autocorrelation_time_mean"] = tau_mean;

  if (reports.size() >= 2 && opts.quantity != "indicator") {
    std::vector<std::vector<double>> series;
    for (auto& r : reports) series.push_back(r.mean_series);
    GelmanRubinResult gr = gelman_rubin(series);
    out["gelman_rubin"] = gr.rhat;
    out["gelman_rubin_degenerate"] = gr.degenerate;
  } else {
    out["gelman_rubin"] = nullptr;
    if (reports.size() < 2) {
      std::cerr << "warning: single restart, Gelman-Rubin omitted\n";
    }
  }

  std::ofstream js(opts.out + ".json");
  if (!js) throw DataError("cannot write " + opts.out + ".json");
  js << out.dump(2) << '\n';
  std::ofstream cs(opts.out + ".csv");
  if (!cs) throw DataError("cannot write " + opts.out + ".csv");
  cs << "restart,dir,autocorrelation_time,accept_rate_x100,normalized_iterations\n";
  for (size_t r = 0; r < reports.size(); ++r) {
    cs << r << ',' << reports[r].dir << ',' << format_double(reports[r].tau) << ','
       << format_double(reports[r].accept_x100) << ',';
    if (reports[r].have_normalized) cs << format_double(reports[r].normalized_iterations);
    cs << '\n';
  }
  std::cout << "wrote " << opts.out << ".json and " << opts.out << ".csv\n";
  return 0;
}

// ------------------------------------------------------------- verify-exact

VerifyExactSummary run_verify_exact(const VerifyExactOptions& opts) {
  RelationalModel model(verification_network(), ModelParams{});
  RunConfig cfg;
  try {
    cfg.sampler = sampler_from_string(opts.sampler);
    cfg.chains = opts.chains;
    cfg.iterations = opts.iterations;
    cfg.seed = opts.seed;
    cfg.interlace = false;  // measure the kernel itself
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  ChainEnsemble<RelationalModel> ens(model, cfg);
  ThreadPool pool(resolve_threads(0, opts.chains));
  std::map<std::string, long long> counts;
  std::vector<TraceRow> rows;
  std::vector<TimingRow> times;
  long long total = 0;
  for (int t = 0; t < opts.iterations; ++t) {
    ens.step(rows, times, &pool);
    for (const TraceRow& r : rows) {
      ++counts[r.partition];
      ++total;
    }
  }

  PartitionTable table = exact_posterior(model);
  VerifyExactSummary sum;
  std::ofstream cs;
  if (!opts.out.empty()) {
    cs.open(opts.out);
    if (!cs) throw DataError("cannot write " + opts.out);
    cs << "partition,empirical,exact,abs_dev\n";
  }
  for (size_t k = 0; k < table.partitions.size(); ++k) {
    const std::string text = to_text(table.partitions[k]);
    const auto it = counts.find(text);
    const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / total;
    const double dev = std::abs(emp - table.prob[k]);
    sum.max_abs_dev = std::max(sum.max_abs_dev, dev);
    sum.total_variation += 0.5 * dev;
    if (cs.is_open()) {
      cs << text << ',' << format_double(emp) << ',' << format_double(table.prob[k])
         << ',' << format_double(dev) << '\n';
    }
  }
  if (cs.is_open()) {
    cs << "# max_abs_dev=" << format_double(sum.max_abs_dev)
       << " total_variation=" << format_double(sum.total_variation) << '\n';
  }
  return sum;
}

int cmd_verify_exact(const VerifyExactOptions& opts) {
  VerifyExactSummary sum = run_verify_exact(opts);
  std::cout << "sampler=" << opts.sampler << " iterations=" << opts.iterations
            << " chains=" << opts.chains
            << " max_abs_dev=" << format_double(sum.max_abs_dev)
            << " total_variation=" << format_double(sum.total_variation) << '\n';
  return 0;
}

}  // namespace blockmc
