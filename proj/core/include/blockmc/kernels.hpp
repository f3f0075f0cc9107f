// Metropolis-Hastings proposal kernels over partitions:
//
//   sm    split-merge with a randomly assigned, thermalized launch state
//   bsm   split-merge with the launch state seeded from context partitions
//   srm   reconfiguration move: observations may flow between the split or
//         merged blocks and the rest of the partition
//   sarm  srm with context-seeded initialization
//   arm   sarm plus joint moves of context-agreed blocks
//
// Every kernel accumulates its proposal probability as a product of sweep
// probabilities. Path uniqueness (enforced by the last-original-member
// constraint and per-block earmarks) makes that product the exact transition
// probability, and makes the reverse probability computable by replaying the
// complementary move forced toward the old state.
#ifndef BLOCKMC_KERNELS_HPP
#define BLOCKMC_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "blockmc/sweeps.hpp"

namespace blockmc {

enum class MoveKind { kSplit, kMerge };

enum class SamplerKind { kGibbs, kSm, kBsm, kSrm, kSarm, kArm };

inline bool sampler_is_adaptive(SamplerKind k) {
  return k == SamplerKind::kBsm || k == SamplerKind::kSarm || k == SamplerKind::kArm;
}

inline const char* to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::kGibbs: return "gibbs";
    case SamplerKind::kSm: return "sm";
    case SamplerKind::kBsm: return "bsm";
    case SamplerKind::kSrm: return "srm";
    case SamplerKind::kSarm: return "sarm";
    case SamplerKind::kArm: return "arm";
  }
  return "?";
}

inline SamplerKind sampler_from_string(const std::string& s) {
  for (SamplerKind k : {SamplerKind::kGibbs, SamplerKind::kSm, SamplerKind::kBsm,
                        SamplerKind::kSrm, SamplerKind::kSarm, SamplerKind::kArm}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown sampler: " + s);
}

// Background information for the adaptive kernels: two past states with
// za_i = za_j and zb_i != zb_j. The constructor swaps the inputs if needed.
struct ProposalContext {
  int i, j;
  Partition za, zb;

  ProposalContext(int i_, int j_, Partition a, Partition b) : i(i_), j(j_) {
    if (i == j) throw std::invalid_argument("context needs distinct observations");
    auto la = a.labels(), lb = b.labels();
    if (la[i] < 0 || la[j] < 0 || lb[i] < 0 || lb[j] < 0) {
      throw std::invalid_argument("context partitions must cover i and j");
    }
    const bool a_together = la[i] == la[j];
    const bool b_together = lb[i] == lb[j];
    if (a_together == b_together) {
      throw std::invalid_argument("context partitions must disagree on (i,j)");
    }
    if (a_together) {
      za = std::move(a);
      zb = std::move(b);
    } else {
      za = std::move(b);
      zb = std::move(a);
    }
  }
};

struct MoveOutcome {
  Partition proposed;
  MoveKind kind = MoveKind::kSplit;
  double log_t_fwd = 0;
  double log_t_rev = 0;
  double log_q_delta = 0;  // log q(proposed) - log q(current)
  double accept_prob = 0;
  bool accepted = false;
};

inline double mh_accept_probability(double log_q_old, double log_q_new,
                                    double log_t_fwd, double log_t_rev) {
  if (std::isnan(log_q_old) || std::isnan(log_q_new) || std::isnan(log_t_fwd) ||
      std::isnan(log_t_rev)) {
    throw std::invalid_argument("NaN in acceptance ratio");
  }
  const double r = (log_t_rev - log_t_fwd) + (log_q_new - log_q_old);
  return r >= 0 ? 1.0 : std::exp(r);
}

inline bool mh_accept(double log_q_old, double log_q_new, double log_t_fwd,
                      double log_t_rev, Rng& rng) {
  const double a = mh_accept_probability(log_q_old, log_q_new, log_t_fwd, log_t_rev);
  return rng.uniform01() < a;
}

inline void finish_accept(MoveOutcome& mo, Rng& rng) {
  mo.accept_prob = mh_accept_probability(0.0, mo.log_q_delta, mo.log_t_fwd, mo.log_t_rev);
  mo.accepted = rng.uniform01() < mo.accept_prob;
}

// Size descending, ties by smallest element ascending.
inline std::vector<Block> iteration_order(std::vector<Block> blocks) {
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return blocks;
}

// Per-iteration label order; rank(i) gives observation i's position. The
// orchestrator feeds a fresh random permutation each iteration so that the
// fixed iteration conventions do not couple to the labelling.
struct Ordering {
  const std::vector<int>* key = nullptr;
  int rank(int i) const { return key ? (*key)[i] : i; }
};

enum class ReconfigVariant { kSrm, kSarm, kArm };

// How a kernel makes its categorical choices: exactly one pointer is set.
//   rng     stochastic proposal
//   script  enumeration driver
//   target  every choice forced towards reproducing `target`
struct KernelMode {
  Rng* rng = nullptr;
  ScriptChooser* script = nullptr;
  const Partition* target = nullptr;
};

struct ReconfigResult {
  bool reachable = true;  // false only in targeted mode
  Partition z_star;
  MoveKind kind = MoveKind::kSplit;
  double log_t = 0;
  double log_q_delta = 0;
};

namespace detail {

struct ReconfigStatus {
  std::vector<std::uint8_t> insider;    // member of z_i or z_j in the start state
  std::vector<std::uint8_t> settled;    // current placement is final
  std::vector<std::uint8_t> processed;  // already visited by the kernel
  std::vector<int> from_label;          // block index in the start state
};

// Forced choice toward `z_to`: the candidate that keeps the target partition
// reachable, or -1 when no candidate does. An observation that must end in a
// block holding neither i nor j is steered by the already-bound members of
// its target block (settled observations, or outsiders that have not been
// visited and therefore stay put). When the target block holds no bound
// member yet, the move must start it: a fresh block where one is offered,
// otherwise the mover stays in its own remainder and later arrivals join it.
template <class Model>
int pick_toward(const std::vector<int>& to_label, const Partition& z_to,
                const ReconfigStatus& st, int i, int j,
                const ChoiceContext<Model>& cc) {
  const int bt = to_label[cc.rep];
  if (bt < 0) return -1;
  int want = kNewBlock;
  bool found = false;
  if (to_label[i] == bt) {
    want = cc.ws.slot_of(i);
    found = true;
  } else if (to_label[j] == bt) {
    want = cc.ws.slot_of(j);
    found = true;
  } else {
    for (int m : z_to.block(bt)) {
      if (m == cc.rep) continue;
      if (std::binary_search(cc.moving.begin(), cc.moving.end(), m)) continue;
      const int s = cc.ws.slot_of(m);
      if (s < 0) continue;
      const bool binding = st.settled[m] || (!st.insider[m] && !st.processed[m]);
      if (!binding) continue;
      if (found && want != s) return -1;
      want = s;
      found = true;
    }
  }
  if (!found) {
    bool have_new = false;
    for (int t : cc.targets) have_new = have_new || t == kNewBlock;
    if (!have_new) want = cc.ws.staged_remainder();
  }
  for (size_t k = 0; k < cc.targets.size(); ++k) {
    if (cc.targets[k] == want) return static_cast<int>(k);
  }
  return -1;
}

template <class Model>
SweepStep mode_step(WorkingState<Model>& ws, const Block& c, int rep,
                    std::span<const int> targets, std::span<const double> override_w,
                    const KernelMode& mode, const ReconfigStatus& st,
                    const std::vector<int>& to_label, int i, int j) {
  if (mode.target) {
    auto director = [&](const ChoiceContext<Model>& cc) {
      return pick_toward(to_label, *mode.target, st, i, j, cc);
    };
    return sweep_staged(ws, c, rep, targets, override_w, director);
  }
  if (mode.script) return sweep_staged(ws, c, rep, targets, override_w, *mode.script);
  RandomChooser rc{mode.rng};
  return sweep_staged(ws, c, rep, targets, override_w, rc);
}

}  // namespace detail

// One reconfiguration proposal (Gibbs-style construction of z* from z given
// (i,j) and, for the adaptive variants, the context pair (za, zb)).
template <class Model>
ReconfigResult reconfig_run(const Model& model, const Partition& z, int i, int j,
                            const Partition* za, const Partition* zb,
                            ReconfigVariant var, Ordering ord, KernelMode mode) {
  const int n = model.num_observations();
  if (i == j) throw std::invalid_argument("need two distinct observations");
  if (z.covered() != n) throw std::invalid_argument("kernel needs a full partition");

  detail::ReconfigStatus st;
  st.from_label = z.labels();
  if (st.from_label[i] < 0 || st.from_label[j] < 0) {
    throw std::invalid_argument("observations not covered");
  }
  const MoveKind kind =
      st.from_label[i] == st.from_label[j] ? MoveKind::kSplit : MoveKind::kMerge;
  st.insider.assign(n, 0);
  st.settled.assign(n, 0);
  st.processed.assign(n, 0);

  const Block bi = z.block(st.from_label[i]);
  for (int x : bi) st.insider[x] = 1;
  Block bj;
  if (kind == MoveKind::kMerge) {
    bj = z.block(st.from_label[j]);
    for (int x : bj) st.insider[x] = 1;
  }

  Block ci{i}, cj{j};
  Partition c;
  if (var != ReconfigVariant::kSrm) {
    if (!za || !zb) throw std::invalid_argument("adaptive variant needs a context");
    c = coarsest_common_refinement(*za, *zb, z);
    ci = c.block_of(i);
    cj = c.block_of(j);
  }

  WorkingState<Model> ws(model, z);
  ws.begin_move(bi);
  ws.drop_staged();
  if (kind == MoveKind::kMerge) {
    ws.begin_move(bj);
    ws.drop_staged();
  }
  if (kind == MoveKind::kSplit) {
    ws.begin_move(ci);
    ws.commit(kNewBlock);
    ws.begin_move(cj);
    ws.commit(kNewBlock);
  } else {
    Block seed;
    seed.reserve(ci.size() + cj.size());
    std::merge(ci.begin(), ci.end(), cj.begin(), cj.end(), std::back_inserter(seed));
    ws.begin_move(seed);
    ws.commit(kNewBlock);
  }
  st.settled[i] = st.settled[j] = 1;
  st.processed[i] = st.processed[j] = 1;

  std::vector<int> to_label;
  if (mode.target) to_label = mode.target->labels();

  ReconfigResult res;
  res.kind = kind;
  double log_t = 0;
  bool ok = true;

  auto step = [&](const Block& cs, int rep, std::span<const int> targets) {
    SweepStep s = detail::mode_step(ws, cs, rep, targets, {}, mode, st, to_label, i, j);
    if (s.aborted) {
      ok = false;
      return;
    }
    log_t += s.log_prob;
  };

  // Joint moves of the context blocks displaced with z_i and z_j.
  if (var == ReconfigVariant::kArm) {
    std::vector<const Block*> pending;
    for (const Block& cb : c.blocks()) {
      if (ws.slot_of(cb.front()) < 0) pending.push_back(&cb);
    }
    auto min_rank = [&](const Block& b) {
      int r = ord.rank(b.front());
      for (int x : b) r = std::min(r, ord.rank(x));
      return r;
    };
    std::sort(pending.begin(), pending.end(), [&](const Block* a, const Block* b) {
      if (a->size() != b->size()) return a->size() > b->size();
      return min_rank(*a) < min_rank(*b);
    });
    for (const Block* a : pending) {
      if (!ok) break;
      ws.begin_move(*a);
      auto targets = detail::full_targets(ws);
      int earmark = a->front();
      for (int x : *a) {
        if (ord.rank(x) < ord.rank(earmark)) earmark = x;
      }
      step(*a, earmark, targets);
      st.settled[earmark] = 1;
      st.processed[earmark] = 1;
    }
  }

  // Per-observation pass over everything not yet locked in.
  if (ok) {
    std::vector<int> rest;
    rest.reserve(n - 2);
    for (int h = 0; h < n; ++h) {
      if (!st.processed[h]) rest.push_back(h);
    }
    std::sort(rest.begin(), rest.end(),
              [&](int a, int b) { return ord.rank(a) < ord.rank(b); });
    Block single(1);
    for (int h : rest) {
      single[0] = h;
      if (st.insider[h]) {
        ws.begin_move(single);
        auto targets = detail::full_targets(ws);
        step(single, h, targets);
      } else {
        // Uniqueness constraint: once outsiders join a block, its last
        // original member may not leave.
        const Block& cb = ws.block(ws.slot_of(h));
        bool last_original = true;
        for (int m : cb) {
          if (m != h && st.from_label[m] == st.from_label[h]) {
            last_original = false;
            break;
          }
        }
        const bool pinned = last_original && cb.size() >= 2;
        ws.begin_move(single);
        std::vector<int> targets;
        if (pinned) {
          targets = {ws.staged_remainder()};
        } else if (kind == MoveKind::kSplit) {
          targets = {ws.slot_of(i), ws.slot_of(j), ws.staged_remainder()};
        } else {
          targets = {ws.slot_of(j), ws.staged_remainder()};
        }
        step(single, h, targets);
      }
      if (!ok) break;
      st.settled[h] = 1;
      st.processed[h] = 1;
    }
  }

  if (!ok) {
    res.reachable = false;
    res.log_t = kNegInf;
    return res;
  }
  res.z_star = ws.snapshot();
  res.log_t = log_t;
  res.log_q_delta = ws.offset();
  if (mode.target && !res.z_star.set_equal(*mode.target)) {
    res.reachable = false;
    res.log_t = kNegInf;
  }
  return res;
}

struct ReplayResult {
  bool reachable = false;
  double log_t = kNegInf;
  MoveKind kind = MoveKind::kSplit;
};

// Probability that the kernel, started at `from` with the same background
// information, would produce `to`.
template <class Model>
ReplayResult reconfig_replay(const Model& model, const Partition& from, int i, int j,
                             const Partition* za, const Partition* zb,
                             ReconfigVariant var, Ordering ord, const Partition& to) {
  KernelMode mode;
  mode.target = &to;
  ReconfigResult r = reconfig_run(model, from, i, j, za, zb, var, ord, mode);
  return {r.reachable, r.log_t, r.kind};
}

namespace detail {

template <class Model>
MoveOutcome reconfig_propose(const Model& model, const Partition& z, int i, int j,
                             const Partition* za, const Partition* zb,
                             ReconfigVariant var, Ordering ord, Rng& rng) {
  KernelMode fwd_mode;
  fwd_mode.rng = &rng;
  ReconfigResult fwd = reconfig_run(model, z, i, j, za, zb, var, ord, fwd_mode);
  ReplayResult rev = reconfig_replay(model, fwd.z_star, i, j, za, zb, var, ord, z);
  MoveOutcome mo;
  mo.proposed = std::move(fwd.z_star);
  mo.kind = fwd.kind;
  mo.log_t_fwd = fwd.log_t;
  mo.log_t_rev = rev.log_t;
  mo.log_q_delta = fwd.log_q_delta;
  return mo;
}

}  // namespace detail

template <class Model>
MoveOutcome srm_propose(const Model& model, const Partition& z, int i, int j,
                        Ordering ord, Rng& rng) {
  return detail::reconfig_propose(model, z, i, j, nullptr, nullptr,
                                  ReconfigVariant::kSrm, ord, rng);
}

template <class Model>
MoveOutcome sarm_propose(const Model& model, const Partition& z,
                         const ProposalContext& ctx, Ordering ord, Rng& rng) {
  return detail::reconfig_propose(model, z, ctx.i, ctx.j, &ctx.za, &ctx.zb,
                                  ReconfigVariant::kSarm, ord, rng);
}

template <class Model>
MoveOutcome arm_propose(const Model& model, const Partition& z,
                        const ProposalContext& ctx, Ordering ord, Rng& rng) {
  return detail::reconfig_propose(model, z, ctx.i, ctx.j, &ctx.za, &ctx.zb,
                                  ReconfigVariant::kArm, ord, rng);
}

// ------------------------------------------------------------- split-merge

struct SmResult {
  MoveOutcome outcome;
  Partition launch;  // state the transition probability sweep started from
};

// Jain-Neal style split-merge. The launch state puts i and j in fresh blocks
// (seeded from the context refinement for bsm, with the rest of S randomly
// assigned for plain sm) and is thermalized with L restricted sweeps. Only
// the final sweep (split) or the forced sweep back to z (merge) enters the
// transition probability.
template <class Model>
SmResult sm_run(const Model& model, const Partition& z, int i, int j, int L,
                const Partition* za, const Partition* zb, Ordering ord,
                KernelMode mode) {
  const int n = model.num_observations();
  if (i == j) throw std::invalid_argument("need two distinct observations");
  if (z.covered() != n) throw std::invalid_argument("kernel needs a full partition");
  if (L < 0) throw std::invalid_argument("negative sweep count");
  std::vector<int> lab = z.labels();
  if (lab[i] < 0 || lab[j] < 0) throw std::invalid_argument("observations not covered");
  const MoveKind kind = lab[i] == lab[j] ? MoveKind::kSplit : MoveKind::kMerge;

  const Block bi = z.block(lab[i]);
  Block bj;
  if (kind == MoveKind::kMerge) bj = z.block(lab[j]);

  Block s_set;
  for (int x : bi) {
    if (x != i && x != j) s_set.push_back(x);
  }
  for (int x : bj) {
    if (x != i && x != j) s_set.push_back(x);
  }
  std::sort(s_set.begin(), s_set.end(),
            [&](int a, int b) { return ord.rank(a) < ord.rank(b); });

  // For a merge the proposal itself; also the state whose hypothetical split
  // the launch describes.
  Partition merged;
  if (kind == MoveKind::kMerge) {
    std::vector<Block> mb;
    for (int k = 0; k < z.num_blocks(); ++k) {
      if (k == lab[i] || k == lab[j]) continue;
      mb.push_back(z.block(k));
    }
    Block joined;
    std::merge(bi.begin(), bi.end(), bj.begin(), bj.end(), std::back_inserter(joined));
    mb.push_back(std::move(joined));
    merged = Partition(n, std::move(mb));
  }

  Block ci{i}, cj{j};
  if (za && zb) {
    // The informed seeds come from the refinement with the state that has i
    // and j together. Both directions of a split/merge pair then draw the
    // launch from the same distribution, which the acceptance ratio assumes.
    const Partition& together = kind == MoveKind::kSplit ? z : merged;
    Partition c = coarsest_common_refinement(*za, *zb, together);
    ci = c.block_of(i);
    cj = c.block_of(j);
  }

  WorkingState<Model> ws(model, z);
  ws.begin_move(bi);
  ws.drop_staged();
  if (kind == MoveKind::kMerge) {
    ws.begin_move(bj);
    ws.drop_staged();
  }
  ws.begin_move(ci);
  ws.commit(kNewBlock);
  ws.begin_move(cj);
  ws.commit(kNewBlock);

  detail::ReconfigStatus dummy_status;
  std::vector<int> dummy_label;
  auto run_step = [&](const Block& cs, int rep, std::span<const int> targets,
                      std::span<const double> override_w) {
    return detail::mode_step(ws, cs, rep, targets, override_w, mode, dummy_status,
                             dummy_label, i, j);
  };

  Block single(1);
  auto side_targets = [&] {
    return std::vector<int>{ws.slot_of(i), ws.slot_of(j)};
  };

  if (!za) {
    // Random launch assignment, one fair coin per observation.
    static const double kHalf[2] = {-0.6931471805599453, -0.6931471805599453};
    for (int h : s_set) {
      single[0] = h;
      ws.begin_move(single);
      auto targets = side_targets();
      run_step(single, h, targets, kHalf);
    }
  }
  for (int l = 0; l < L; ++l) {
    for (int h : s_set) {
      single[0] = h;
      ws.begin_move(single);
      auto targets = side_targets();
      run_step(single, h, targets, {});
    }
  }

  SmResult out;
  out.outcome.kind = kind;
  if (kind == MoveKind::kSplit) {
    out.launch = ws.snapshot();
    double log_t = 0;
    for (int h : s_set) {
      single[0] = h;
      ws.begin_move(single);
      auto targets = side_targets();
      log_t += run_step(single, h, targets, {}).log_prob;
    }
    out.outcome.proposed = ws.snapshot();
    out.outcome.log_t_fwd = log_t;
    out.outcome.log_t_rev = 0;
    out.outcome.log_q_delta = ws.offset();
  } else {
    out.launch = ws.snapshot();
    // Force every observation back to its side in z; the product is T(z|z*).
    double log_t = 0;
    for (int h : s_set) {
      single[0] = h;
      ws.begin_move(single);
      auto targets = side_targets();
      const int forced = lab[h] == lab[i] ? 0 : 1;
      auto chooser = [forced](const auto&) { return forced; };
      SweepStep st = detail::sweep_staged(ws, single, h,
                                          std::span<const int>(targets), {}, chooser);
      log_t += st.log_prob;
    }
    assert(ws.snapshot().set_equal(z));
    out.outcome.proposed = std::move(merged);
    out.outcome.log_t_fwd = 0;
    out.outcome.log_t_rev = log_t;
    // Exact merge delta, computed incrementally like everything else.
    WorkingState<Model> wd(model, z);
    wd.begin_move(bj);
    wd.commit(wd.slot_of(i));
    out.outcome.log_q_delta = wd.offset();
  }
  return out;
}

template <class Model>
MoveOutcome sm_propose(const Model& model, const Partition& z, int i, int j, int L,
                       Ordering ord, Rng& rng) {
  KernelMode mode;
  mode.rng = &rng;
  return sm_run(model, z, i, j, L, nullptr, nullptr, ord, mode).outcome;
}

template <class Model>
MoveOutcome bsm_propose(const Model& model, const Partition& z,
                        const ProposalContext& ctx, int L, Ordering ord, Rng& rng) {
  KernelMode mode;
  mode.rng = &rng;
  return sm_run(model, z, ctx.i, ctx.j, L, &ctx.za, &ctx.zb, ord, mode).outcome;
}

// Scripted entry point for exhaustive path enumeration.
struct ScriptedKernelResult {
  Partition z_star;
  MoveKind kind;
  double kernel_log_t;  // the T the kernel itself reports for this path
};

template <class Model>
ScriptedKernelResult run_kernel_scripted(const Model& model, SamplerKind kernel,
                                         const Partition& z, int i, int j,
                                         const Partition* za, const Partition* zb,
                                         int L, Ordering ord, ScriptChooser& sc) {
  KernelMode mode;
  mode.script = &sc;
  switch (kernel) {
    case SamplerKind::kSm:
    case SamplerKind::kBsm: {
      const Partition* a = kernel == SamplerKind::kBsm ? za : nullptr;
      const Partition* b = kernel == SamplerKind::kBsm ? zb : nullptr;
      SmResult r = sm_run(model, z, i, j, L, a, b, ord, mode);
      const double t = r.outcome.kind == MoveKind::kSplit ? r.outcome.log_t_fwd
                                                          : r.outcome.log_t_rev;
      return {std::move(r.outcome.proposed), r.outcome.kind, t};
    }
    case SamplerKind::kSrm:
    case SamplerKind::kSarm:
    case SamplerKind::kArm: {
      const ReconfigVariant var = kernel == SamplerKind::kSrm ? ReconfigVariant::kSrm
                                  : kernel == SamplerKind::kSarm
                                      ? ReconfigVariant::kSarm
                                      : ReconfigVariant::kArm;
      ReconfigResult r = reconfig_run(model, z, i, j, za, zb, var, ord, mode);
      return {std::move(r.z_star), r.kind, r.log_t};
    }
    default:
      throw std::invalid_argument("kernel has no proposal paths to enumerate");
  }
}

}  // namespace blockmc

#endif
