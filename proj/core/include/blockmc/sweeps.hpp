// Restricted Gibbs sweeps: joint reassignment of a set C to one of a list of
// candidate blocks, drawn proportionally to q. These are the primitive moves
// every kernel is assembled from.
#ifndef BLOCKMC_SWEEPS_HPP
#define BLOCKMC_SWEEPS_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "blockmc/mathutil.hpp"
#include "blockmc/rng.hpp"
#include "blockmc/working_state.hpp"

namespace blockmc {

template <class Model>
struct ChoiceContext {
  const WorkingState<Model>& ws;
  const Block& moving;
  // The element whose final placement the choice pins down. For single moves
  // this is the observation itself; for joint block moves it is the earmark.
  int rep;
  std::span<const int> targets;      // block indices post-detach, kNewBlock = new
  std::span<const double> log_prob;  // normalized
};

// Draws by inverse CDF with a single uniform per choice.
struct RandomChooser {
  Rng* rng;
  template <class Model>
  int operator()(const ChoiceContext<Model>& c) {
    const double u = rng->uniform01();
    double acc = 0;
    const int m = static_cast<int>(c.log_prob.size());
    for (int k = 0; k < m; ++k) {
      acc += std::exp(c.log_prob[k]);
      if (u < acc) return k;
    }
    return m - 1;
  }
};

// Replays a recorded choice prefix and takes the first branch at fresh choice
// points, recording arity. Drives exhaustive path enumeration.
struct ScriptChooser {
  std::vector<int>* script;
  size_t pos = 0;
  std::vector<int> arity;
  double log_prob_sum = 0;

  template <class Model>
  int operator()(const ChoiceContext<Model>& c) {
    int idx;
    if (pos < script->size()) {
      idx = (*script)[pos];
    } else {
      idx = 0;
      script->push_back(0);
    }
    ++pos;
    arity.push_back(static_cast<int>(c.log_prob.size()));
    log_prob_sum += c.log_prob[idx];
    return idx;
  }
};

struct SweepStep {
  int chosen = 0;
  double log_prob = 0;
  int num_candidates = 0;
  bool aborted = false;  // target-directed run hit an impossible branch
};

namespace detail {

// Weights the staged set against `targets`, normalizes, picks via `choose`,
// and commits. `log_weight_override` replaces the q-weights when non-empty
// (used for the uniform random assignment in split-merge launches).
template <class Model, class Chooser>
SweepStep sweep_staged(WorkingState<Model>& ws, const Block& c, int rep,
                       std::span<const int> targets,
                       std::span<const double> log_weight_override,
                       Chooser&& choose) {
  const int m = static_cast<int>(targets.size());
  assert(m >= 1);
  std::vector<double> logw(m);
  if (log_weight_override.empty()) {
    for (int k = 0; k < m; ++k) logw[k] = ws.attach_delta(targets[k]);
  } else {
    assert(static_cast<int>(log_weight_override.size()) == m);
    for (int k = 0; k < m; ++k) logw[k] = log_weight_override[k];
  }
  const double lse = log_sum_exp(logw);
  for (double& w : logw) w -= lse;
  ChoiceContext<Model> ctx{ws, c, rep, targets, logw};
  const int idx = choose(ctx);
  if (idx < 0) {
    return {.chosen = -1, .log_prob = kNegInf, .num_candidates = m, .aborted = true};
  }
  ws.commit(targets[idx]);
  return {.chosen = idx, .log_prob = logw[idx], .num_candidates = m, .aborted = false};
}

// Candidate list for an unrestricted move of the staged set: every block of
// the working partition in list order, then a fresh block. Because c is
// detached first, "stay" is represented by the source remainder and a fully
// consumed source collapses into the fresh-block candidate, so no outcome
// appears twice.
template <class Model>
std::vector<int> full_targets(const WorkingState<Model>& ws) {
  std::vector<int> t(ws.num_blocks() + 1);
  for (int k = 0; k < ws.num_blocks(); ++k) t[k] = k;
  t.back() = kNewBlock;
  return t;
}

}  // namespace detail

struct SweepResult {
  Partition z_star;
  double prob = 0;  // normalized probability of the realized choice
  int chosen = 0;
  int num_candidates = 0;
};

namespace detail {

template <class Model>
struct ResolvedCandidates {
  std::vector<int> targets;
};

// Maps a candidate list I of blocks (each empty or equal to a block of z)
// onto post-detach targets. The spec'd deduplication: if C's own block is
// fully consumed and the empty set is also listed, both describe the same
// outcome and collapse into a single fresh-block candidate.
template <class Model>
ResolvedCandidates<Model> resolve_candidates(const WorkingState<Model>& ws,
                                             const Partition& z, const Block& c,
                                             const std::vector<Block>& cands) {
  if (cands.empty()) throw std::invalid_argument("empty candidate list");
  ResolvedCandidates<Model> out;
  bool have_new = false;
  for (const Block& a : cands) {
    int target;
    if (a.empty()) {
      target = kNewBlock;
    } else {
      // Representative not in C identifies the block post-detach.
      int rep = -1;
      for (int x : a) {
        if (!std::binary_search(c.begin(), c.end(), x)) {
          rep = x;
          break;
        }
      }
      if (rep < 0) {
        target = kNewBlock;  // candidate block is exactly C
      } else {
        target = ws.slot_of(rep);
        if (target < 0) throw std::invalid_argument("candidate is not a block of z");
        // Validate the candidate matches the block it points into.
        const Block& ref = z.block_of(rep);
        if (ref != a) throw std::invalid_argument("candidate is not a block of z");
      }
    }
    if (target == kNewBlock) {
      if (have_new) continue;  // deduplicate
      have_new = true;
    } else {
      for (int t : out.targets) {
        if (t == target) throw std::invalid_argument("duplicate candidate block");
      }
    }
    out.targets.push_back(target);
  }
  return out;
}

}  // namespace detail

// Assigns C to one of the candidate blocks in I with probability proportional
// to q of the outcome. I entries must each be the empty set or a block of z.
template <class Model>
SweepResult restricted_sweep(const Model& model, const Partition& z, const Block& c,
                             const std::vector<Block>& cands, Rng& rng) {
  WorkingState<Model> ws(model, z);
  ws.begin_move(c);
  auto rc = detail::resolve_candidates(ws, z, c, cands);
  RandomChooser ch{&rng};
  SweepStep st = detail::sweep_staged(ws, c, c.front(), rc.targets, {}, ch);
  return {ws.snapshot(), std::exp(st.log_prob), st.chosen, st.num_candidates};
}

// Forcibly assigns C to candidate k and reports the probability that
// restricted_sweep would have drawn it.
template <class Model>
SweepResult forced_sweep(const Model& model, const Partition& z, const Block& c,
                         const std::vector<Block>& cands, int k) {
  WorkingState<Model> ws(model, z);
  ws.begin_move(c);
  auto rc = detail::resolve_candidates(ws, z, c, cands);
  if (k < 0 || k >= static_cast<int>(rc.targets.size())) {
    throw std::invalid_argument("forced candidate index out of range");
  }
  auto forced = [k](const auto&) { return k; };
  SweepStep st = detail::sweep_staged(ws, c, c.front(), rc.targets, {}, forced);
  return {ws.snapshot(), std::exp(st.log_prob), st.chosen, st.num_candidates};
}

// Unrestricted move: C may join any block of z or open a new one.
template <class Model>
SweepResult full_sweep_step(const Model& model, const Partition& z, const Block& c,
                            Rng& rng) {
  WorkingState<Model> ws(model, z);
  ws.begin_move(c);
  auto targets = detail::full_targets(ws);
  RandomChooser ch{&rng};
  SweepStep st = detail::sweep_staged(ws, c, c.front(), targets, {}, ch);
  return {ws.snapshot(), std::exp(st.log_prob), st.chosen, st.num_candidates};
}

// One full Gibbs pass over all observations in the given order (identity when
// order is null). Mutates ws in place.
template <class Model>
void gibbs_full_sweep(WorkingState<Model>& ws, const std::vector<int>* order, Rng& rng) {
  RandomChooser ch{&rng};
  const int n = static_cast<int>(ws.covered());
  Block c(1);
  for (int pos = 0; pos < n; ++pos) {
    const int h = order ? (*order)[pos] : pos;
    c[0] = h;
    ws.begin_move(c);
    auto targets = detail::full_targets(ws);
    detail::sweep_staged(ws, c, h, std::span<const int>(targets), {}, ch);
  }
}

}  // namespace blockmc

#endif
