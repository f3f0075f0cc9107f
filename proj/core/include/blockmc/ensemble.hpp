// Multi-chain driver: warm-started chains advanced in lockstep epochs, a
// growing shared history window, and adaptive context selection from past
// states where two chains disagree about a pair of observations.
#ifndef BLOCKMC_ENSEMBLE_HPP
#define BLOCKMC_ENSEMBLE_HPP

#include <chrono>
#include <optional>
#include <unordered_map>

#include "blockmc/kernels.hpp"
#include "blockmc/thread_pool.hpp"
#include "blockmc/trace.hpp"

namespace blockmc {

struct RunConfig {
  SamplerKind sampler = SamplerKind::kGibbs;
  int chains = 8;
  int iterations = 1000;
  double burn_in = 0.5;
  std::uint64_t seed = 1;
  ModelParams params;
  int sm_sweeps = 5;  // intermediate restricted sweeps for sm/bsm
  int restarts = 1;
  int threads = 0;  // 0 = min(chains, hardware)
  int warmup_sweeps = 50;
  bool interlace = true;       // follow each move by a full Gibbs sweep
  bool disable_moves = false;  // validation aid: skip every kernel proposal

  void validate() const {
    if (chains < 1) throw std::invalid_argument("need at least one chain");
    if (iterations < 1) throw std::invalid_argument("need at least one iteration");
    if (burn_in < 0 || burn_in >= 1) throw std::invalid_argument("burn-in must be in [0,1)");
    if (sm_sweeps < 0) throw std::invalid_argument("negative sweep count");
    if (restarts < 1) throw std::invalid_argument("need at least one restart");
    if (warmup_sweeps < 0) throw std::invalid_argument("negative warmup");
    if (sampler_is_adaptive(sampler) && chains < 2) {
      throw std::invalid_argument("adaptive samplers need at least two chains");
    }
  }
};

// View over the shared history window: iterations [lo, hi] of every chain,
// stored as canonical keys.
struct HistoryWindow {
  const std::vector<std::vector<std::string>>* hist;
  int lo = 0, hi = 0;

  int chains() const { return static_cast<int>(hist->size()); }
  int rows() const { return hi - lo + 1; }
  int total() const { return chains() * rows(); }
  const std::string& key(int chain, int row) const { return (*hist)[chain][lo + row]; }
};

// Draws (za, zb) from the window, the first from `chain`'s own history, the
// pair re-drawn until the two states differ, then (i, j) uniformly from the
// pairs whose co-clustering the two states disagree on. `any_disagreement`
// must report whether the window holds at least two distinct states; when it
// does not, selection is impossible and nullopt is returned.
inline std::optional<ProposalContext> select_context(const HistoryWindow& w, int chain,
                                                     int n, bool any_disagreement,
                                                     Rng& rng) {
  if (!any_disagreement) return std::nullopt;
  const int rows = w.rows();
  const int total = w.total();
  int a_row, b_chain, b_row;
  for (;;) {
    a_row = rng.uniform_int(rows);
    const int a_lin = chain * rows + a_row;
    int b_lin = rng.uniform_int(total - 1);
    if (b_lin >= a_lin) ++b_lin;
    b_chain = b_lin / rows;
    b_row = b_lin % rows;
    if (w.key(chain, a_row) != w.key(b_chain, b_row)) break;
  }
  Partition a = partition_from_key(w.key(chain, a_row), n);
  Partition b = partition_from_key(w.key(b_chain, b_row), n);
  const std::vector<int> la = a.labels(), lb = b.labels();
  int count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((la[i] == la[j]) != (lb[i] == lb[j])) ++count;
    }
  }
  int pick = rng.uniform_int(count);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((la[i] == la[j]) != (lb[i] == lb[j]) && pick-- == 0) {
        return ProposalContext(i, j, std::move(a), std::move(b));
      }
    }
  }
  return std::nullopt;  // unreachable
}

template <class Model>
class ChainEnsemble {
 public:
  ChainEnsemble(const Model& model, const RunConfig& cfg)
      : model_(&model), cfg_(cfg), n_(model.num_observations()), hist_(cfg.chains) {
    cfg_.validate();
    rngs_.reserve(cfg_.chains);
    scratch_.resize(cfg_.chains);
    for (int s = 0; s < cfg_.chains; ++s) {
      rngs_.emplace_back(derive_seed(cfg_.seed, static_cast<std::uint64_t>(s)));
      Partition z = Partition::singletons(n_);
      WorkingState<Model> ws(*model_, z);
      for (int w = 0; w < cfg_.warmup_sweeps; ++w) {
        gibbs_full_sweep(ws, nullptr, rngs_[s]);
      }
      current_.push_back(ws.snapshot());
      hist_[s].push_back(canonical_key(current_[s]));
      add_window_key(hist_[s][0]);
    }
  }

  int time() const { return t_; }
  int num_chains() const { return cfg_.chains; }
  const Partition& state(int s) const { return current_[s]; }
  const RunConfig& config() const { return cfg_; }

  int window_lo() const { return t_ / 2; }
  std::size_t window_size() const {
    return static_cast<std::size_t>(t_ - window_lo() + 1) * cfg_.chains;
  }
  bool window_has_disagreement() const { return window_counts_.size() > 1; }

  // Advances every chain by one iteration. Outputs are indexed by chain.
  void step(std::vector<TraceRow>& rows, std::vector<TimingRow>& timings,
            ThreadPool* pool) {
    rows.resize(cfg_.chains);
    timings.resize(cfg_.chains);
    std::vector<Partition> next(cfg_.chains);
    auto task = [&](int s) { chain_iteration(s, rows[s], timings[s], next[s]); };
    if (pool) {
      pool->run(cfg_.chains, task);
    } else {
      for (int s = 0; s < cfg_.chains; ++s) task(s);
    }
    for (int s = 0; s < cfg_.chains; ++s) {
      current_[s] = std::move(next[s]);
      hist_[s].push_back(canonical_key(current_[s]));
      add_window_key(hist_[s].back());
    }
    ++t_;
    const int new_lo = t_ / 2;
    for (; evicted_below_ < new_lo; ++evicted_below_) {
      for (int s = 0; s < cfg_.chains; ++s) remove_window_key(hist_[s][evicted_below_]);
    }
  }

 private:
  struct Scratch {
    std::vector<int> order;  // position -> observation
    std::vector<int> rank;   // observation -> position
  };

  HistoryWindow window() const { return {&hist_, window_lo(), t_}; }

  void chain_iteration(int s, TraceRow& row, TimingRow& timing, Partition& out) {
    using clock = std::chrono::steady_clock;
    Rng& rng = rngs_[s];
    Scratch& sc = scratch_[s];
    rng.permutation(n_, sc.order);
    sc.rank.resize(n_);
    for (int pos = 0; pos < n_; ++pos) sc.rank[sc.order[pos]] = pos;
    const Ordering ord{&sc.rank};

    row = TraceRow{};
    row.iteration = t_ + 1;
    row.chain = s;
    timing = TimingRow{};
    timing.iteration = t_ + 1;
    timing.chain = s;

    const Partition& z = current_[s];
    std::optional<MoveOutcome> mo;
    TraceMove mv = TraceMove::kNone;

    const auto k0 = clock::now();
    if (cfg_.sampler != SamplerKind::kGibbs && !cfg_.disable_moves) {
      if (sampler_is_adaptive(cfg_.sampler)) {
        auto ctx = select_context(window(), s, n_, window_has_disagreement(), rng);
        if (!ctx) {
          mv = TraceMove::kSkipped;
        } else {
          switch (cfg_.sampler) {
            case SamplerKind::kBsm:
              mo = bsm_propose(*model_, z, *ctx, cfg_.sm_sweeps, ord, rng);
              break;
            case SamplerKind::kSarm:
              mo = sarm_propose(*model_, z, *ctx, ord, rng);
              break;
            default:
              mo = arm_propose(*model_, z, *ctx, ord, rng);
              break;
          }
        }
      } else {
        auto [i, j] = rng.distinct_pair(n_);
        if (cfg_.sampler == SamplerKind::kSm) {
          mo = sm_propose(*model_, z, i, j, cfg_.sm_sweeps, ord, rng);
        } else {
          mo = srm_propose(*model_, z, i, j, ord, rng);
        }
      }
      if (mo) {
        finish_accept(*mo, rng);
        mv = mo->kind == MoveKind::kSplit ? TraceMove::kSplit : TraceMove::kMerge;
      }
    }
    timing.kernel_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - k0).count();

    Partition next = mo && mo->accepted ? std::move(mo->proposed) : z;

    const auto g0 = clock::now();
    const bool sweep = cfg_.sampler == SamplerKind::kGibbs || cfg_.interlace ||
                       mv == TraceMove::kSkipped || cfg_.disable_moves;
    if (sweep) {
      WorkingState<Model> ws(*model_, next);
      gibbs_full_sweep(ws, &sc.order, rng);
      next = ws.snapshot();
    }
    timing.gibbs_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - g0).count();

    row.move = mv;
    if (mo) {
      row.accepted = mo->accepted;
      row.log_t_fwd = mo->log_t_fwd;
      row.log_t_rev = mo->log_t_rev;
    }
    row.log_q = model_->log_joint(next);
    row.num_blocks = next.num_blocks();
    row.partition = to_text(next);
    out = std::move(next);
  }

  void add_window_key(const std::string& k) { ++window_counts_[k]; }
  void remove_window_key(const std::string& k) {
    auto it = window_counts_.find(k);
    if (it != window_counts_.end() && --it->second == 0) window_counts_.erase(it);
  }

  const Model* model_;
  RunConfig cfg_;
  int n_;
  std::vector<Partition> current_;
  std::vector<std::vector<std::string>> hist_;
  std::unordered_map<std::string, int> window_counts_;
  std::vector<Rng> rngs_;
  std::vector<Scratch> scratch_;
  int t_ = 0;
  int evicted_below_ = 0;
};

}  // namespace blockmc

#endif
