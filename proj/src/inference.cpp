#include "mapind/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mapind/errors.hpp"
#include "mapind/factor.hpp"

namespace mapind {

namespace engine {

namespace {

constexpr std::uint64_t kBruteForceGuard = std::uint64_t{1} << 26;

struct VeValue {
  double mantissa = 1.0;
  double log_scale = 0.0;
};

// Sum-product elimination restricted to the ancestral closure of the bound
// variables; everything outside it sums to one.
VeValue run_ve(const Network& net, const StateVector& states, bool rescale) {
  const std::size_t n = net.size();
  std::vector<bool> relevant(n, false);
  std::vector<VarId> stack;
  for (VarId v = 0; v < n; ++v)
    if (states[v] != kUnbound) stack.push_back(v);
  while (!stack.empty()) {
    const VarId v = stack.back();
    stack.pop_back();
    if (relevant[v]) continue;
    relevant[v] = true;
    for (VarId p : net.parents(v)) stack.push_back(p);
  }

  VeValue result;
  std::vector<Factor> pool;
  std::vector<std::vector<bool>> interaction(n, std::vector<bool>(n, false));
  std::vector<VarId> free_vars;
  for (VarId v = 0; v < n; ++v) {
    if (!relevant[v]) continue;
    if (states[v] == kUnbound) free_vars.push_back(v);
    Factor f = cpt_factor(net, v, states);
    for (VarId a : f.scope)
      for (VarId b : f.scope) interaction[a][b] = true;
    pool.push_back(std::move(f));
  }

  const EliminationOrder order = min_fill_order(std::move(interaction), free_vars);
  for (VarId v : order.order) {
    std::vector<const Factor*> bucket;
    std::vector<Factor> rest;
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].contains(v)) picked.push_back(i);
    }
    for (std::size_t i : picked) bucket.push_back(&pool[i]);
    Factor reduced = combine(bucket, v);
    if (rescale) {
      const double m = normalize_max(reduced);
      if (m == 0.0) return {0.0, 0.0};
      result.log_scale += std::log(m);
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!std::binary_search(picked.begin(), picked.end(), i)) rest.push_back(std::move(pool[i]));
    }
    rest.push_back(std::move(reduced));
    pool = std::move(rest);
  }
  for (const Factor& f : pool) {
    // Only constants remain once every free variable is gone.
    double c = f.values.front();
    if (rescale) {
      if (c == 0.0) return {0.0, 0.0};
      result.log_scale += std::log(c);
    } else {
      result.mantissa *= c;
    }
  }
  return result;
}

double log_sum_exp(std::span<const double> logs) {
  const double m = *std::max_element(logs.begin(), logs.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - m);
  return m + std::log(s);
}

}  // namespace

double ve_marginal(const Network& net, const StateVector& states) {
  const VeValue v = run_ve(net, states, false);
  if (v.mantissa < kUnderflowThreshold && v.mantissa >= 0.0) {
    const double logp = ve_log_marginal(net, states);
    return std::exp(logp);
  }
  return v.mantissa;
}

double ve_log_marginal(const Network& net, const StateVector& states) {
  const VeValue v = run_ve(net, states, true);
  if (v.mantissa == 0.0) return -std::numeric_limits<double>::infinity();
  return v.log_scale;
}

double brute_marginal(const Network& net, const StateVector& states) {
  std::vector<VarId> free_vars;
  std::vector<std::size_t> cards;
  for (VarId v = 0; v < net.size(); ++v) {
    if (states[v] == kUnbound) {
      free_vars.push_back(v);
      cards.push_back(net.cardinality(v));
    }
  }
  AssignmentOdometer it(cards);
  if (it.count() > kBruteForceGuard) {
    throw CapacityError("brute-force marginal would enumerate " + std::to_string(it.count()) +
                        " completions");
  }
  StateVector full = states;
  double total = 0.0;
  for (; !it.done(); it.next()) {
    for (std::size_t i = 0; i < free_vars.size(); ++i) full[free_vars[i]] = it.current()[i];
    double p = 1.0;
    for (VarId v = 0; v < net.size() && p != 0.0; ++v) p *= net.entry(v, full);
    total += p;
  }
  return total;
}

MapScan scan_map(const Network& net, std::span<const VarId> hypothesis, const StateVector& bound,
                 const InferenceOptions& options) {
  std::vector<std::size_t> cards;
  for (VarId h : hypothesis) cards.push_back(net.cardinality(h));
  AssignmentOdometer it(cards);
  if (it.count() > options.max_hypothesis_space) {
    throw CapacityError("|Ω(H)| = " + std::to_string(it.count()) + " exceeds the guard of " +
                        std::to_string(options.max_hypothesis_space));
  }

  MapScan scan;
  StateVector states = bound;
  scan.joints.reserve(it.count());
  for (; !it.done(); it.next()) {
    for (std::size_t i = 0; i < hypothesis.size(); ++i) states[hypothesis[i]] = it.current()[i];
    scan.joints.push_back(options.method == Method::kBruteForce ? brute_marginal(net, states)
                                                                : ve_marginal(net, states));
  }

  auto best_it = std::max_element(scan.joints.begin(), scan.joints.end());
  if (*best_it < kUnderflowThreshold) {
    scan.log_space = true;
    AssignmentOdometer again(cards);
    for (std::size_t r = 0; !again.done(); again.next(), ++r) {
      for (std::size_t i = 0; i < hypothesis.size(); ++i) states[hypothesis[i]] = again.current()[i];
      scan.joints[r] = ve_log_marginal(net, states);
    }
    best_it = std::max_element(scan.joints.begin(), scan.joints.end());
    if (*best_it == -std::numeric_limits<double>::infinity()) {
      throw InfeasibleQueryError("conditioning event has probability zero");
    }
    scan.total = log_sum_exp(scan.joints);
  } else {
    for (double j : scan.joints) scan.total += j;
  }

  // max_element returns the first maximum, i.e. canonical tie-breaking.
  scan.best_rank = static_cast<std::uint64_t>(best_it - scan.joints.begin());
  scan.best = it.at(scan.best_rank);
  const double best = *best_it;
  double runner_up = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < scan.joints.size(); ++r) {
    if (r == scan.best_rank) continue;
    runner_up = std::max(runner_up, scan.joints[r]);
    if (best - scan.joints[r] <= options.tie_tolerance) scan.tie = true;
  }
  scan.runner_up_gap = scan.joints.size() > 1 ? best - runner_up : 0.0;
  return scan;
}

}  // namespace engine

namespace {

StateVector bind_disjoint(const Network& net, const Assignment& a, const Assignment& b) {
  StateVector states = net.bind(a);
  for (const auto& [var, state] : b) {
    const VarId v = net.id(var);
    if (states[v] != kUnbound) {
      throw QueryError("variable '" + var + "' is bound twice in one query");
    }
    states[v] = net.state_index(v, state);
  }
  return states;
}

double marginal_of(const Network& net, const StateVector& states, Method method) {
  return method == Method::kBruteForce ? engine::brute_marginal(net, states)
                                       : engine::ve_marginal(net, states);
}

}  // namespace

double joint_probability(const Network& net, const Assignment& full) {
  net.require_valid();
  const StateVector states = net.bind(full);
  for (VarId v = 0; v < net.size(); ++v) {
    if (states[v] == kUnbound) {
      throw QueryError("joint probability needs a full assignment; '" + net.variable(v).name +
                       "' is unbound");
    }
  }
  double p = 1.0;
  for (VarId v = 0; v < net.size(); ++v) p *= net.entry(v, states);
  return p;
}

double marginal(const Network& net, const Assignment& partial, Method method) {
  net.require_valid();
  return marginal_of(net, net.bind(partial), method);
}

double posterior(const Network& net, const Assignment& target, const Assignment& evidence,
                 Method method) {
  net.require_valid();
  const StateVector joint = bind_disjoint(net, target, evidence);
  const StateVector ev = net.bind(evidence);
  const double denominator = marginal_of(net, ev, method);
  if (denominator < kUnderflowThreshold) {
    const double log_den = engine::ve_log_marginal(net, ev);
    if (std::isinf(log_den)) throw InfeasibleQueryError("evidence has probability zero");
    return std::exp(engine::ve_log_marginal(net, joint) - log_den);
  }
  return marginal_of(net, joint, method) / denominator;
}

MapResult map_solve(const Network& net, std::span<const std::string> hypothesis,
                    const Assignment& evidence, const Assignment& conditioning,
                    const InferenceOptions& options) {
  net.require_valid();
  if (hypothesis.empty()) throw QueryError("hypothesis set must be non-empty");
  const StateVector bound = bind_disjoint(net, evidence, conditioning);
  const std::vector<VarId> hyp = net.ids(hypothesis);
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (bound[hyp[i]] != kUnbound) {
      throw QueryError("hypothesis variable '" + hypothesis[i] + "' is also observed");
    }
    for (std::size_t j = 0; j < i; ++j)
      if (hyp[j] == hyp[i]) throw QueryError("hypothesis variable '" + hypothesis[i] + "' repeated");
  }

  const engine::MapScan scan = engine::scan_map(net, hyp, bound, options);
  MapResult result;
  StateVector states(net.size(), kUnbound);
  for (std::size_t i = 0; i < hyp.size(); ++i) states[hyp[i]] = scan.best[i];
  result.assignment = net.unbind(hyp, states);
  result.joint_probability = scan.joints[scan.best_rank];
  result.posterior = scan.log_space ? std::exp(result.joint_probability - scan.total)
                                    : result.joint_probability / scan.total;
  result.tie = scan.tie;
  result.runner_up_gap = scan.runner_up_gap;
  result.log_space = scan.log_space;
  return result;
}

bool map_threshold(const Network& net, const Assignment& h_star, const Assignment& evidence,
                   const Rational& q, Method method) {
  net.require_valid();
  const StateVector joint = bind_disjoint(net, h_star, evidence);
  const StateVector ev = net.bind(evidence);
  if (marginal_of(net, ev, method) == 0.0 && std::isinf(engine::ve_log_marginal(net, ev))) {
    throw InfeasibleQueryError("evidence has probability zero");
  }
  return exceeds(marginal_of(net, joint, method), q);
}

}  // namespace mapind
