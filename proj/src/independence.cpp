#include "mapind/independence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "mapind/errors.hpp"

namespace mapind {

const char* to_string(IndependenceMode mode) {
  switch (mode) {
    case IndependenceMode::kStrong: return "strong";
    case IndependenceMode::kWeak: return "weak";
    case IndependenceMode::kMaximum: return "maximum";
    case IndependenceMode::kThreshold: return "threshold";
    case IndependenceMode::kQuantify: return "quantify";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::uint64_t kNoStop = std::numeric_limits<std::uint64_t>::max();

// Result of evaluating one r ∈ Ω(R).
struct Outcome {
  bool skipped = false;
  bool stops = false;  // counterexample, failed threshold, or error
  bool tie = false;
  std::vector<int> map;  // MAP states under r (MAP sweeps only)
  double joint_h_star = 0;
  double prob_r = 0;  // Pr(r | e)
  std::size_t hamming = 0;
  std::exception_ptr error;
};

struct Sweep {
  std::vector<Outcome> outcomes;  // indexed by rank
  std::uint64_t stop_rank = kNoStop;
  bool short_circuited = false;

  // Ranks whose outcome the report may depend on: all of them for a full
  // sweep, otherwise everything up to and including the first stopping rank.
  // Identical for any worker count.
  std::uint64_t effective_end() const {
    return stop_rank == kNoStop || !short_circuited ? outcomes.size() : stop_rank + 1;
  }
};

// Shared state of one query: the network, H, e and the reference MAP.
struct Context {
  const Network& net;
  const IndependenceOptions& options;
  std::vector<VarId> hypothesis;
  StateVector evidence;
  std::vector<int> h_star;
  std::uint64_t h_star_rank = 0;
  bool reference_tie = false;
  double prob_e = 0;  // Pr(e), log when log_space
  bool log_space = false;
};

std::uint64_t hypothesis_rank(const Network& net, std::span<const VarId> hyp, std::span<const int> states) {
  std::vector<std::size_t> cards;
  for (VarId h : hyp) cards.push_back(net.cardinality(h));
  return AssignmentOdometer(cards).rank(states);
}

Context make_context(const Network& net, const QueryPartition& partition,
                     const IndependenceOptions& options) {
  net.require_valid();
  validate_partition(net, partition);
  Context ctx{net, options, net.ids(partition.hypothesis), net.bind(partition.evidence), {}, 0, false, 0, false};
  // Throws InfeasibleQueryError when Pr(e) = 0.
  const engine::MapScan ref = engine::scan_map(net, ctx.hypothesis, ctx.evidence, options.inference);
  ctx.h_star = ref.best;
  ctx.h_star_rank = ref.best_rank;
  ctx.reference_tie = ref.tie;
  ctx.prob_e = ref.total;
  ctx.log_space = ref.log_space;
  return ctx;
}

std::vector<std::size_t> cardinalities(const Network& net, std::span<const VarId> vars) {
  std::vector<std::size_t> cards;
  for (VarId v : vars) cards.push_back(net.cardinality(v));
  return cards;
}

void check_focus_space(const AssignmentOdometer& odo, const IndependenceOptions& options) {
  if (odo.count() > options.max_focus_space) {
    throw CapacityError("|Ω(R)| = " + std::to_string(odo.count()) + " exceeds the guard of " +
                        std::to_string(options.max_focus_space));
  }
}

// Evaluates every r ∈ Ω(focus) with `eval`, in parallel when configured.
// With stop_at_first, evaluation may end after the first stopping rank; all
// ranks up to it are always evaluated.
template <typename Eval>
Sweep sweep(const Context& ctx, std::span<const VarId> focus, bool stop_at_first, Eval eval) {
  const AssignmentOdometer odo(cardinalities(ctx.net, focus));
  check_focus_space(odo, ctx.options);
  const std::uint64_t total = odo.count();

  Sweep result;
  result.outcomes.resize(total);
  result.short_circuited = stop_at_first;
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> bound{kNoStop};

  auto worker = [&] {
    StateVector states = ctx.evidence;
    for (;;) {
      const std::uint64_t rank = next.fetch_add(1);
      if (rank >= total) return;
      if (stop_at_first && rank > bound.load()) return;
      const std::vector<int> r = odo.at(rank);
      for (std::size_t i = 0; i < focus.size(); ++i) states[focus[i]] = r[i];
      Outcome& out = result.outcomes[rank];
      try {
        eval(states, out);
      } catch (...) {
        out.error = std::current_exception();
        out.stops = true;
      }
      if (out.stops) {
        std::uint64_t cur = bound.load();
        while (rank < cur && !bound.compare_exchange_weak(cur, rank)) {
        }
        if (stop_at_first) return;
      }
    }
  };

  const unsigned n = std::max(1u, ctx.options.workers);
  if (n == 1 || total < 2) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < std::min<std::uint64_t>(n, total); ++i) pool.emplace_back(worker);
  }

  for (std::uint64_t rank = 0; rank < total; ++rank) {
    if (result.outcomes[rank].stops) {
      result.stop_rank = rank;
      break;
    }
  }
  for (std::uint64_t rank = 0; rank < result.effective_end(); ++rank) {
    if (result.outcomes[rank].error) std::rethrow_exception(result.outcomes[rank].error);
  }
  return result;
}

// MAP of H under (r, e), compared against h*.
auto map_evaluator(const Context& ctx) {
  return [&ctx](const StateVector& states, Outcome& out) {
    engine::MapScan scan;
    try {
      scan = engine::scan_map(ctx.net, ctx.hypothesis, states, ctx.options.inference);
    } catch (const InfeasibleQueryError&) {
      if (ctx.options.strict_zeros) {
        throw InfeasibleQueryError("focus assignment has probability zero given the evidence");
      }
      out.skipped = true;
      return;
    }
    out.map = scan.best;
    out.tie = scan.tie;
    const double hj = scan.joints[ctx.h_star_rank];
    out.joint_h_star = scan.log_space ? std::exp(hj) : hj;
    if (scan.log_space || ctx.log_space) {
      const double log_pr = scan.log_space ? scan.total : std::log(scan.total);
      const double log_pe = ctx.log_space ? ctx.prob_e : std::log(ctx.prob_e);
      out.prob_r = std::exp(log_pr - log_pe);
    } else {
      out.prob_r = scan.total / ctx.prob_e;
    }
    for (std::size_t i = 0; i < scan.best.size(); ++i)
      if (scan.best[i] != ctx.h_star[i]) ++out.hamming;
    out.stops = out.hamming != 0;
  };
}

Assignment focus_assignment(const Network& net, std::span<const VarId> focus, std::uint64_t rank) {
  const AssignmentOdometer odo(cardinalities(net, focus));
  const std::vector<int> r = odo.at(rank);
  StateVector states(net.size(), kUnbound);
  for (std::size_t i = 0; i < focus.size(); ++i) states[focus[i]] = r[i];
  return net.unbind(focus, states);
}

Assignment hypothesis_assignment(const Context& ctx, std::span<const int> h) {
  StateVector states(ctx.net.size(), kUnbound);
  for (std::size_t i = 0; i < h.size(); ++i) states[ctx.hypothesis[i]] = h[i];
  return ctx.net.unbind(ctx.hypothesis, states);
}

// Folds the effective part of a MAP sweep into the report.
void absorb(const Context& ctx, std::span<const VarId> focus, const Sweep& sw,
            IndependenceReport& report) {
  const std::uint64_t end = sw.effective_end();
  for (std::uint64_t rank = 0; rank < end; ++rank) {
    const Outcome& o = sw.outcomes[rank];
    if (o.skipped) {
      report.skipped.push_back(focus_assignment(ctx.net, focus, rank));
    } else {
      ++report.map_computations;
      report.ties_encountered |= o.tie;
    }
    if (ctx.options.table_limit > 0) {
      if (report.per_assignment.size() < ctx.options.table_limit) {
        AssignmentRow row;
        row.focus = focus_assignment(ctx.net, focus, rank);
        if (!o.skipped) row.map = hypothesis_assignment(ctx, o.map);
        row.joint_h_star = o.joint_h_star;
        row.skipped = o.skipped;
        row.tie = o.tie;
        report.per_assignment.push_back(std::move(row));
      } else {
        report.table_truncated = true;
      }
    }
  }
  if (sw.stop_rank != kNoStop && !report.counterexample) {
    report.verdict = false;
    report.counterexample = focus_assignment(ctx.net, focus, sw.stop_rank);
    report.counterexample_map = hypothesis_assignment(ctx, sw.outcomes[sw.stop_rank].map);
  }
}

void finish(const Context& ctx, IndependenceReport& report, Clock::time_point start) {
  report.ties_encountered |= ctx.reference_tie;
  if (report.ties_encountered) report.warnings.emplace_back(kTieWarning);
  if (!report.skipped.empty()) report.warnings.emplace_back("zero-probability-assignments-skipped");
  report.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
}

IndependenceReport base_report(const Context& ctx, IndependenceMode mode) {
  IndependenceReport report;
  report.mode = mode;
  report.verdict = true;
  report.h_star = hypothesis_assignment(ctx, ctx.h_star);
  report.map_computations = 1;
  return report;
}

bool wants_full_sweep(const IndependenceOptions& options) {
  return !options.short_circuit || options.table_limit > 0;
}

// Strong check of one focus set against the context's h*.
struct StrongOutcome {
  bool verdict = true;
  bool ties = false;
};

StrongOutcome strong_check(const Context& ctx, std::span<const VarId> focus) {
  const Sweep sw = sweep(ctx, focus, true, map_evaluator(ctx));
  StrongOutcome out;
  out.verdict = sw.stop_rank == kNoStop;
  for (std::uint64_t rank = 0; rank < sw.effective_end(); ++rank) out.ties |= sw.outcomes[rank].tie;
  return out;
}

void require_focus(const QueryPartition& partition) {
  if (partition.focus.empty()) throw QueryError("focus set must be non-empty");
}

}  // namespace

IndependenceReport strong_map_independence(const Network& net, const QueryPartition& partition,
                                           const IndependenceOptions& options) {
  const auto start = Clock::now();
  require_focus(partition);
  const Context ctx = make_context(net, partition, options);
  IndependenceReport report = base_report(ctx, IndependenceMode::kStrong);
  const std::vector<VarId> focus = net.ids(partition.focus);
  const Sweep sw = sweep(ctx, focus, !wants_full_sweep(options), map_evaluator(ctx));
  absorb(ctx, focus, sw, report);
  finish(ctx, report, start);
  return report;
}

IndependenceReport weak_map_independence(const Network& net, const QueryPartition& partition,
                                         const IndependenceOptions& options) {
  const auto start = Clock::now();
  require_focus(partition);
  const Context ctx = make_context(net, partition, options);
  IndependenceReport report = base_report(ctx, IndependenceMode::kWeak);
  const bool full = wants_full_sweep(options);
  for (const auto& name : partition.focus) {
    const VarId single[] = {net.id(name)};
    const Sweep sw = sweep(ctx, single, !full, map_evaluator(ctx));
    absorb(ctx, single, sw, report);
    if (!report.verdict && !full) break;
  }
  finish(ctx, report, start);
  return report;
}

IndependenceReport maximum_map_independence(const Network& net, const QueryPartition& partition,
                                            std::size_t k, const IndependenceOptions& options) {
  const auto start = Clock::now();
  require_focus(partition);
  const std::size_t n = partition.focus.size();
  if (k < 1 || k > n) {
    throw QueryError("k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  }
  // C(n, k), saturating.
  std::uint64_t subsets = 1;
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t num = n - i;
    if (subsets > options.max_subsets * (i + 1)) {
      subsets = std::numeric_limits<std::uint64_t>::max();
      break;
    }
    subsets = subsets * num / (i + 1);
  }
  if (subsets > options.max_subsets) {
    throw CapacityError("C(" + std::to_string(n) + ", " + std::to_string(k) +
                        ") subsets exceed the guard of " + std::to_string(options.max_subsets));
  }

  const Context ctx = make_context(net, partition, options);
  IndependenceReport report = base_report(ctx, IndependenceMode::kMaximum);
  report.verdict = false;
  const std::vector<VarId> pool = net.ids(partition.focus);

  // Subsets as sorted positions into `pool`.
  std::vector<std::vector<std::size_t>> failing;
  bool ties = false;
  auto pruned = [&](const std::vector<std::size_t>& cand) {
    if (!options.prune_supersets || ties) return false;
    for (const auto& f : failing)
      if (std::includes(cand.begin(), cand.end(), f.begin(), f.end())) return true;
    return false;
  };
  auto test = [&](const std::vector<std::size_t>& cand) {
    std::vector<VarId> focus;
    for (std::size_t i : cand) focus.push_back(pool[i]);
    const StrongOutcome out = strong_check(ctx, focus);
    ++report.subsets_tested;
    ties |= out.ties;
    if (!out.verdict) failing.push_back(cand);
    return out.verdict;
  };

  std::vector<std::size_t> comb(k);
  for (std::size_t i = 0; i < k; ++i) comb[i] = i;
  std::optional<std::vector<std::size_t>> hit;
  for (;;) {
    if (pruned(comb)) {
      ++report.subsets_pruned;
    } else if (test(comb)) {
      hit = comb;
      break;
    }
    // Next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }

  if (hit) {
    report.verdict = true;
    // Greedy extension to a maximal set; sound only while tie-free.
    for (std::size_t v = 0; v < n && !ties; ++v) {
      if (std::binary_search(hit->begin(), hit->end(), v)) continue;
      std::vector<std::size_t> cand = *hit;
      cand.insert(std::upper_bound(cand.begin(), cand.end(), v), v);
      if (pruned(cand)) {
        ++report.subsets_pruned;
        continue;
      }
      if (test(cand)) hit = std::move(cand);
    }
    for (std::size_t i : *hit) report.subset.push_back(partition.focus[i]);
  }
  report.map_computations = 0;  // not tracked per subset
  report.ties_encountered = ties;
  finish(ctx, report, start);
  return report;
}

IndependenceReport threshold_map_independence(const Network& net, const Assignment& h_star,
                                              const QueryPartition& partition, const Rational& s,
                                              const IndependenceOptions& options) {
  const auto start = Clock::now();
  net.require_valid();
  require_focus(partition);
  QueryPartition p = partition;
  if (p.hypothesis.empty()) {
    for (const auto& [var, state] : h_star) p.hypothesis.push_back(var);
  }
  validate_partition(net, p);
  {
    std::vector<std::string> declared = p.hypothesis;
    std::vector<std::string> given;
    for (const auto& [var, state] : h_star) given.push_back(var);
    std::sort(declared.begin(), declared.end());
    if (declared != given) throw QueryError("h_star must assign exactly the hypothesis variables");
  }

  const StateVector evidence = net.bind(p.evidence);
  if (engine::ve_marginal(net, evidence) == 0.0 && std::isinf(engine::ve_log_marginal(net, evidence))) {
    throw InfeasibleQueryError("evidence has probability zero");
  }
  const StateVector h_states = net.bind(h_star);
  StateVector base = evidence;
  for (VarId v = 0; v < net.size(); ++v)
    if (h_states[v] != kUnbound) base[v] = h_states[v];

  IndependenceOptions opts = options;
  Context ctx{net, opts, net.ids(p.hypothesis), base, {}, 0, false, 0, false};
  for (VarId h : ctx.hypothesis) ctx.h_star.push_back(h_states[h]);
  ctx.h_star_rank = hypothesis_rank(net, ctx.hypothesis, ctx.h_star);

  const std::vector<VarId> focus = net.ids(p.focus);
  const Sweep sw = sweep(ctx, focus, !wants_full_sweep(options),
                         [&](const StateVector& states, Outcome& out) {
                           out.joint_h_star = engine::ve_marginal(net, states);
                           out.stops = !exceeds(out.joint_h_star, s);
                         });

  IndependenceReport report;
  report.mode = IndependenceMode::kThreshold;
  report.h_star = h_star;
  report.verdict = sw.stop_rank == kNoStop;
  double min_joint = std::numeric_limits<double>::infinity();
  for (std::uint64_t rank = 0; rank < sw.effective_end(); ++rank) {
    const Outcome& o = sw.outcomes[rank];
    min_joint = std::min(min_joint, o.joint_h_star);
    if (options.table_limit > 0) {
      if (report.per_assignment.size() < options.table_limit) {
        AssignmentRow row;
        row.focus = focus_assignment(net, focus, rank);
        row.joint_h_star = o.joint_h_star;
        report.per_assignment.push_back(std::move(row));
      } else {
        report.table_truncated = true;
      }
    }
  }
  if (sw.effective_end() > 0) report.min_joint = min_joint;
  if (!report.verdict) report.counterexample = focus_assignment(net, focus, sw.stop_rank);
  report.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return report;
}

IndependenceReport quantify(const Network& net, const QueryPartition& partition,
                            const IndependenceOptions& options) {
  const auto start = Clock::now();
  require_focus(partition);
  const Context ctx = make_context(net, partition, options);
  IndependenceReport report = base_report(ctx, IndependenceMode::kQuantify);
  const std::vector<VarId> focus = net.ids(partition.focus);
  const Sweep sw = sweep(ctx, focus, false, map_evaluator(ctx));
  absorb(ctx, focus, sw, report);

  // Ordered reduction over ranks keeps the sums identical for any worker count.
  Quantification q;
  std::size_t unchanged = 0;
  double hamming = 0;
  for (const Outcome& o : sw.outcomes) {
    if (o.skipped || o.hamming == 0) {
      ++unchanged;
      q.mass += o.skipped ? 0.0 : o.prob_r;
    }
    hamming += static_cast<double>(o.hamming);
  }
  const auto total = static_cast<double>(sw.outcomes.size());
  q.proportion = static_cast<double>(unchanged) / total;
  q.mean_hamming = hamming / total;
  report.metrics = q;
  finish(ctx, report, start);
  return report;
}

RelevancePartition relevance_partition(const Network& net, const Assignment& evidence,
                                       const std::vector<std::string>& hypothesis,
                                       const std::vector<std::string>& candidates,
                                       RelevanceMode /*mode*/, const IndependenceOptions& options) {
  RelevancePartition out;
  if (candidates.empty()) return out;
  QueryPartition all{evidence, hypothesis, candidates};
  const Context ctx = make_context(net, all, options);
  for (const auto& name : candidates) {
    const VarId single[] = {net.id(name)};
    const Sweep sw = sweep(ctx, single, true, map_evaluator(ctx));
    RelevanceVerdict verdict;
    verdict.variable = name;
    verdict.relevant = sw.stop_rank != kNoStop;
    for (std::uint64_t rank = 0; rank < sw.effective_end(); ++rank) verdict.tie |= sw.outcomes[rank].tie;
    verdict.tie |= ctx.reference_tie;
    if (verdict.relevant) verdict.counterexample = focus_assignment(net, single, sw.stop_rank);
    (verdict.relevant ? out.relevant : out.irrelevant).push_back(name);
    out.justification.push_back(std::move(verdict));
  }
  return out;
}

}  // namespace mapind
