#pragma once

// Test-only oracles. Everything here works from the full joint table built by
// explicit chain-rule enumeration and never calls the elimination engine or
// the MAP scanner, so it can check both.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mapind/compiler.hpp"
#include "mapind/documents.hpp"
#include "mapind/model.hpp"
#include "mapind/random_network.hpp"

namespace mapind::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(MAPIND_FIXTURE_DIR) / (name + ".json");
}

inline Network fixture(const std::string& name) { return load_network(fixture_path(name)); }

// Every full assignment with its probability.
class JointTable {
 public:
  explicit JointTable(const Network& net) : net_(net) {
    std::vector<std::size_t> cards;
    for (VarId v = 0; v < net.size(); ++v) cards.push_back(net.cardinality(v));
    for (AssignmentOdometer it(cards); !it.done(); it.next()) {
      StateVector s(it.current().begin(), it.current().end());
      double p = 1.0;
      for (VarId v = 0; v < net.size(); ++v) {
        std::size_t row = 0;
        for (VarId par : net.parents(v)) row = row * net.cardinality(par) + static_cast<std::size_t>(s[par]);
        p *= net.table(v)[row * net.cardinality(v) + static_cast<std::size_t>(s[v])];
      }
      rows_.emplace_back(std::move(s), p);
    }
  }

  double probability(const StateVector& partial) const {
    double total = 0.0;
    for (const auto& [s, p] : rows_)
      if (matches(s, partial)) total += p;
    return total;
  }

  double probability(const Assignment& partial) const { return probability(net_.bind(partial)); }

  struct Argmax {
    std::vector<int> best;
    std::vector<double> joints;  // canonical order over Ω(H)
    bool tie = false;
    double total = 0;
  };

  // argmax over Ω(H) of Pr(h, bound).
  Argmax argmax(const std::vector<VarId>& hyp, const StateVector& bound, double tie_tol = 1e-9) const {
    std::vector<std::size_t> cards;
    for (VarId h : hyp) cards.push_back(net_.cardinality(h));
    AssignmentOdometer odo(cards);
    Argmax out;
    out.joints.assign(odo.count(), 0.0);
    for (const auto& [s, p] : rows_) {
      if (!matches(s, bound)) continue;
      std::vector<int> h;
      for (VarId v : hyp) h.push_back(s[v]);
      out.joints[odo.rank(h)] += p;
      out.total += p;
    }
    const auto it = std::max_element(out.joints.begin(), out.joints.end());
    out.best = odo.at(static_cast<std::uint64_t>(it - out.joints.begin()));
    for (auto j = out.joints.begin(); j != out.joints.end(); ++j)
      if (j != it && *it - *j <= tie_tol) out.tie = true;
    return out;
  }

 private:
  static bool matches(const StateVector& full, const StateVector& partial) {
    for (std::size_t i = 0; i < full.size(); ++i)
      if (partial[i] != kUnbound && partial[i] != full[i]) return false;
    return true;
  }

  const Network& net_;
  std::vector<std::pair<StateVector, double>> rows_;
};

// Pairwise definition: every feasible r ∈ Ω(R) yields the same argmax.
struct DefinitionCheck {
  bool independent = true;
  bool tie = false;
};

inline DefinitionCheck brute_strong(const Network& net, const QueryPartition& p) {
  const JointTable joint(net);
  const auto hyp = net.ids(p.hypothesis);
  const auto focus = net.ids(p.focus);
  const StateVector ev = net.bind(p.evidence);
  std::vector<std::size_t> cards;
  for (VarId r : focus) cards.push_back(net.cardinality(r));

  DefinitionCheck out;
  out.tie = joint.argmax(hyp, ev).tie;
  std::optional<std::vector<int>> first;
  for (AssignmentOdometer it(cards); !it.done(); it.next()) {
    StateVector bound = ev;
    for (std::size_t i = 0; i < focus.size(); ++i) bound[focus[i]] = it.current()[i];
    const auto am = joint.argmax(hyp, bound);
    if (am.total == 0.0) continue;
    out.tie |= am.tie;
    if (!first) {
      first = am.best;
    } else if (*first != am.best) {
      out.independent = false;
    }
  }
  return out;
}

// For every assignment to `a_vars`, do strictly more than half of the
// assignments to the remaining variables satisfy f?
inline bool brute_amajsat(const Formula& f, const std::vector<std::string>& a_vars) {
  const auto vars = f.variables();
  std::vector<std::string> m_vars;
  for (const auto& v : vars)
    if (std::find(a_vars.begin(), a_vars.end(), v) == a_vars.end()) m_vars.push_back(v);
  std::vector<std::string> order = a_vars;
  order.insert(order.end(), m_vars.begin(), m_vars.end());
  std::vector<bool> values(order.size());
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << a_vars.size()); ++a) {
    for (std::size_t i = 0; i < a_vars.size(); ++i) values[i] = (a >> i) & 1U;
    std::uint64_t sat = 0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << m_vars.size()); ++m) {
      for (std::size_t i = 0; i < m_vars.size(); ++i) values[a_vars.size() + i] = (m >> i) & 1U;
      if (f.evaluate(order, values)) ++sat;
    }
    if (2 * sat <= (std::uint64_t{1} << m_vars.size())) return false;
  }
  return true;
}

inline Formula random_formula(std::mt19937_64& rng, std::size_t n_vars, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<std::size_t> var(1, n_vars);
  const int k = pick(rng);
  if (depth <= 0 || k < 3) return Formula::variable("x" + std::to_string(var(rng)));
  if (k < 5) return Formula::negation(random_formula(rng, n_vars, depth - 1));
  Formula lhs = random_formula(rng, n_vars, depth - 1);
  Formula rhs = random_formula(rng, n_vars, depth - 1);
  return k < 8 ? Formula::conjunction(std::move(lhs), std::move(rhs))
               : Formula::disjunction(std::move(lhs), std::move(rhs));
}

// Random split of a network's variables into evidence / hypothesis / focus.
struct RandomQuery {
  QueryPartition partition;
  std::vector<std::string> rest;  // unused intermediates
};

inline RandomQuery random_query(std::mt19937_64& rng, const Network& net, std::size_t n_hyp,
                                std::size_t n_focus, std::size_t n_evidence) {
  std::vector<VarId> order(net.size());
  for (VarId v = 0; v < net.size(); ++v) order[v] = v;
  std::shuffle(order.begin(), order.end(), rng);
  RandomQuery q;
  std::size_t i = 0;
  for (; i < n_hyp; ++i) q.partition.hypothesis.push_back(net.variable(order[i]).name);
  for (; i < n_hyp + n_focus; ++i) q.partition.focus.push_back(net.variable(order[i]).name);
  for (; i < n_hyp + n_focus + n_evidence; ++i) {
    const auto& v = net.variable(order[i]);
    std::uniform_int_distribution<std::size_t> s(0, v.states.size() - 1);
    q.partition.evidence[v.name] = v.states[s(rng)];
  }
  for (; i < net.size(); ++i) q.rest.push_back(net.variable(order[i]).name);
  return q;
}

}  // namespace mapind::testing

namespace mapind::testing {

// Binary {T, F} network from (child, parents, rows) triples, declared in the
// order given.
inline Network binary_network(const std::vector<Cpt>& cpts) {
  std::vector<Variable> vars;
  for (const auto& c : cpts) vars.push_back({c.child, {"T", "F"}});
  return Network("test", std::move(vars), cpts);
}

inline Network chain(std::size_t n) {
  std::vector<Cpt> cpts{{"X0", {}, {{0.3, 0.7}}}};
  for (std::size_t i = 1; i < n; ++i)
    cpts.push_back({"X" + std::to_string(i), {"X" + std::to_string(i - 1)}, {{0.8, 0.2}, {0.25, 0.75}}});
  return binary_network(cpts);
}

}  // namespace mapind::testing
