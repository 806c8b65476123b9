#include "mapind/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "mapind/errors.hpp"

namespace mapind {

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kDuplicateVariable: return "duplicate-variable";
    case Violation::Kind::kTooFewStates: return "too-few-states";
    case Violation::Kind::kDuplicateState: return "duplicate-state";
    case Violation::Kind::kUnknownCptVariable: return "unknown-cpt-variable";
    case Violation::Kind::kMissingCpt: return "missing-cpt";
    case Violation::Kind::kDuplicateCpt: return "duplicate-cpt";
    case Violation::Kind::kUnknownParent: return "unknown-parent";
    case Violation::Kind::kDuplicateParent: return "duplicate-parent";
    case Violation::Kind::kRowCountMismatch: return "row-count-mismatch";
    case Violation::Kind::kColumnCountMismatch: return "column-count-mismatch";
    case Violation::Kind::kEntryOutOfRange: return "entry-out-of-range";
    case Violation::Kind::kRowSum: return "row-sum";
    case Violation::Kind::kCycle: return "cycle";
  }
  return "unknown";
}

Network::Network(std::string name, std::vector<Variable> variables, std::vector<Cpt> cpts)
    : name_(std::move(name)), variables_(std::move(variables)), cpts_(std::move(cpts)) {
  index();
}

void Network::index() {
  const std::size_t n = variables_.size();
  parents_.assign(n, {});
  children_.assign(n, {});
  tables_.assign(n, {});

  auto report = [this](Violation::Kind kind, std::string location, std::string message,
                       double deviation = 0.0) {
    violations_.push_back({kind, std::move(location), std::move(message), deviation});
  };

  for (VarId v = 0; v < n; ++v) {
    const Variable& var = variables_[v];
    const std::string loc = "variables[" + std::to_string(v) + "]";
    if (!by_name_.emplace(var.name, v).second) {
      report(Violation::Kind::kDuplicateVariable, loc, "variable '" + var.name + "' declared twice");
    }
    if (var.states.size() < 2) {
      report(Violation::Kind::kTooFewStates, loc,
             "variable '" + var.name + "' has " + std::to_string(var.states.size()) +
                 " state(s); at least 2 required");
    }
    std::set<std::string> seen;
    for (const auto& s : var.states) {
      if (!seen.insert(s).second) {
        report(Violation::Kind::kDuplicateState, loc,
               "variable '" + var.name + "' repeats state '" + s + "'");
      }
    }
  }

  std::vector<int> cpt_of(n, -1);
  for (std::size_t c = 0; c < cpts_.size(); ++c) {
    const Cpt& cpt = cpts_[c];
    const std::string loc = "cpt[" + cpt.child + "]";
    auto it = by_name_.find(cpt.child);
    if (it == by_name_.end()) {
      report(Violation::Kind::kUnknownCptVariable, loc, "CPT for undeclared variable '" + cpt.child + "'");
      continue;
    }
    const VarId child = it->second;
    if (cpt_of[child] != -1) {
      report(Violation::Kind::kDuplicateCpt, loc, "second CPT for '" + cpt.child + "'");
      continue;
    }
    cpt_of[child] = static_cast<int>(c);

    bool parents_ok = true;
    std::vector<VarId> parent_ids;
    for (const auto& p : cpt.parents) {
      auto pit = by_name_.find(p);
      if (pit == by_name_.end()) {
        report(Violation::Kind::kUnknownParent, loc, "parent '" + p + "' is not a declared variable");
        parents_ok = false;
        continue;
      }
      if (std::find(parent_ids.begin(), parent_ids.end(), pit->second) != parent_ids.end()) {
        report(Violation::Kind::kDuplicateParent, loc, "parent '" + p + "' listed twice");
        parents_ok = false;
        continue;
      }
      parent_ids.push_back(pit->second);
    }
    if (!parents_ok) continue;

    std::size_t expected_rows = 1;
    for (VarId p : parent_ids) expected_rows *= cardinality(p);
    const std::size_t card = cardinality(child);
    bool shape_ok = true;
    if (cpt.rows.size() != expected_rows) {
      report(Violation::Kind::kRowCountMismatch, loc,
             "expected " + std::to_string(expected_rows) + " rows, found " +
                 std::to_string(cpt.rows.size()));
      shape_ok = false;
    }
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      const auto& row = cpt.rows[r];
      const std::string rloc = loc + ".row[" + std::to_string(r) + "]";
      if (row.size() != card) {
        report(Violation::Kind::kColumnCountMismatch, rloc,
               "expected " + std::to_string(card) + " columns, found " + std::to_string(row.size()));
        shape_ok = false;
        continue;
      }
      double sum = 0.0;
      for (std::size_t s = 0; s < row.size(); ++s) {
        const double p = row[s];
        if (!(p >= 0.0 && p <= 1.0)) {
          std::ostringstream os;
          os << "entry " << s << " = " << p << " outside [0,1]";
          report(Violation::Kind::kEntryOutOfRange, rloc, os.str());
          shape_ok = false;
        }
        sum += p;
      }
      const double deviation = std::abs(sum - 1.0);
      if (!(deviation <= kRowSumTolerance)) {
        std::ostringstream os;
        os.precision(17);
        os << "row sums to " << sum << " (deviation " << deviation << ")";
        report(Violation::Kind::kRowSum, rloc, os.str(), deviation);
        shape_ok = false;
      }
    }

    parents_[child] = parent_ids;
    for (VarId p : parent_ids) children_[p].push_back(child);
    if (shape_ok) {
      auto& table = tables_[child];
      table.reserve(expected_rows * card);
      for (const auto& row : cpt.rows) table.insert(table.end(), row.begin(), row.end());
    }
  }

  for (VarId v = 0; v < n; ++v) {
    if (cpt_of[v] == -1) {
      report(Violation::Kind::kMissingCpt, "variables[" + std::to_string(v) + "]",
             "no CPT for '" + variables_[v].name + "'");
    }
  }
  for (auto& kids : children_) std::sort(kids.begin(), kids.end());

  // Kahn over the resolvable edges; whatever is left sits on or behind a cycle.
  std::vector<std::size_t> indegree(n);
  for (VarId v = 0; v < n; ++v) indegree[v] = parents_[v].size();
  std::deque<VarId> ready;
  for (VarId v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t visited = 0;
  while (!ready.empty()) {
    VarId v = ready.front();
    ready.pop_front();
    ++visited;
    for (VarId c : children_[v])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (visited != n) {
    std::string members;
    for (VarId v = 0; v < n; ++v) {
      if (indegree[v] > 0) {
        if (!members.empty()) members += ", ";
        members += variables_[v].name;
      }
    }
    report(Violation::Kind::kCycle, "graph", "directed cycle through {" + members + "}");
  }
}

void Network::require_valid() const {
  if (valid()) return;
  std::string msg = "network '" + name_ + "' is invalid:";
  for (const auto& v : violations_) msg += "\n  " + v.location + ": " + v.message;
  throw NetworkError(msg);
}

std::optional<VarId> Network::find(const std::string& variable) const {
  auto it = by_name_.find(variable);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

VarId Network::id(const std::string& variable) const {
  auto v = find(variable);
  if (!v) throw QueryError("unknown variable '" + variable + "'");
  return *v;
}

int Network::state_index(VarId var, const std::string& state) const {
  const auto& states = variables_[var].states;
  auto it = std::find(states.begin(), states.end(), state);
  if (it == states.end()) {
    throw QueryError("variable '" + variables_[var].name + "' has no state '" + state + "'");
  }
  return static_cast<int>(it - states.begin());
}

double Network::entry(VarId v, const StateVector& states) const {
  std::size_t row = 0;
  for (VarId p : parents_[v]) row = row * cardinality(p) + static_cast<std::size_t>(states[p]);
  return tables_[v][row * cardinality(v) + static_cast<std::size_t>(states[v])];
}

StateVector Network::bind(const Assignment& assignment) const {
  StateVector states(size(), kUnbound);
  for (const auto& [var, state] : assignment) {
    const VarId v = id(var);
    states[v] = state_index(v, state);
  }
  return states;
}

Assignment Network::unbind(std::span<const VarId> vars, const StateVector& states) const {
  Assignment out;
  for (VarId v : vars) {
    if (states[v] != kUnbound) out[variables_[v].name] = variables_[v].states[states[v]];
  }
  return out;
}

std::vector<VarId> Network::ids(std::span<const std::string> names) const {
  std::vector<VarId> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(id(n));
  return out;
}

void validate_partition(const Network& net, const QueryPartition& partition) {
  if (partition.hypothesis.empty()) throw QueryError("hypothesis set must be non-empty");
  std::vector<int> owner(net.size(), 0);  // 1 evidence, 2 hypothesis, 3 focus
  static const char* kRole[] = {"", "evidence", "hypothesis", "focus"};
  auto claim = [&](const std::string& name, int role) {
    const VarId v = net.id(name);
    if (owner[v] != 0) {
      throw QueryError("variable '" + name + "' appears in both " + kRole[owner[v]] + " and " +
                       kRole[role] + " sets");
    }
    owner[v] = role;
  };
  for (const auto& [var, state] : partition.evidence) {
    claim(var, 1);
    net.state_index(net.id(var), state);
  }
  for (const auto& h : partition.hypothesis) claim(h, 2);
  for (const auto& r : partition.focus) claim(r, 3);
}

ValidationReport validate_network(const Network& net) { return net.violations(); }

std::vector<std::string> topological_order(const Network& net) {
  for (const auto& v : net.violations()) {
    if (v.kind == Violation::Kind::kCycle) throw NetworkError(v.message);
  }
  const std::size_t n = net.size();
  std::vector<std::size_t> indegree(n);
  std::priority_queue<VarId, std::vector<VarId>, std::greater<>> ready;
  for (VarId v = 0; v < n; ++v) {
    indegree[v] = net.parents(v).size();
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::string> order;
  order.reserve(n);
  while (!ready.empty()) {
    VarId v = ready.top();
    ready.pop();
    order.push_back(net.variable(v).name);
    for (VarId c : net.children(v))
      if (--indegree[c] == 0) ready.push(c);
  }
  return order;
}

bool d_separated(const Network& net, std::span<const std::string> x,
                 std::span<const std::string> y, std::span<const std::string> z) {
  const std::size_t n = net.size();
  std::vector<int> role(n, 0);  // 1 x, 2 y, 3 z
  auto mark = [&](std::span<const std::string> names, int r) {
    for (const auto& name : names) {
      const VarId v = net.id(name);
      if (role[v] != 0 && role[v] != r) {
        throw QueryError("d-separation sets overlap at '" + name + "'");
      }
      role[v] = r;
    }
  };
  mark(x, 1);
  mark(y, 2);
  mark(z, 3);

  // Ancestors of the observed set (inclusive): colliders in here are open.
  std::vector<bool> z_ancestor(n, false);
  std::vector<VarId> stack;
  for (VarId v = 0; v < n; ++v)
    if (role[v] == 3) stack.push_back(v);
  while (!stack.empty()) {
    VarId v = stack.back();
    stack.pop_back();
    if (z_ancestor[v]) continue;
    z_ancestor[v] = true;
    for (VarId p : net.parents(v)) stack.push_back(p);
  }

  // Reachability over (node, direction) pairs. kUp: arrived from a child;
  // kDown: arrived from a parent.
  enum Dir { kUp = 0, kDown = 1 };
  std::vector<std::array<bool, 2>> visited(n, {false, false});
  std::vector<std::pair<VarId, Dir>> frontier;
  for (VarId v = 0; v < n; ++v)
    if (role[v] == 1) frontier.emplace_back(v, kUp);

  while (!frontier.empty()) {
    auto [v, dir] = frontier.back();
    frontier.pop_back();
    if (visited[v][dir]) continue;
    visited[v][dir] = true;
    const bool observed = role[v] == 3;
    if (!observed && role[v] == 2) return false;

    if (dir == kUp && !observed) {
      for (VarId p : net.parents(v)) frontier.emplace_back(p, kUp);
      for (VarId c : net.children(v)) frontier.emplace_back(c, kDown);
    } else if (dir == kDown) {
      if (!observed)
        for (VarId c : net.children(v)) frontier.emplace_back(c, kDown);
      if (z_ancestor[v])
        for (VarId p : net.parents(v)) frontier.emplace_back(p, kUp);
    }
  }
  return true;
}

AssignmentOdometer::AssignmentOdometer(std::vector<std::size_t> cardinalities)
    : cards_(std::move(cardinalities)), current_(cards_.size(), 0) {
  for (auto c : cards_)
    if (c == 0) done_ = true;
}

void AssignmentOdometer::next() {
  for (std::size_t i = cards_.size(); i-- > 0;) {
    if (static_cast<std::size_t>(++current_[i]) < cards_[i]) return;
    current_[i] = 0;
  }
  done_ = true;
}

std::uint64_t AssignmentOdometer::count() const {
  std::uint64_t total = 1;
  for (auto c : cards_) {
    if (c != 0 && total > std::numeric_limits<std::uint64_t>::max() / c) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= c;
  }
  return total;
}

std::vector<int> AssignmentOdometer::at(std::uint64_t rank) const {
  std::vector<int> states(cards_.size(), 0);
  for (std::size_t i = cards_.size(); i-- > 0;) {
    states[i] = static_cast<int>(rank % cards_[i]);
    rank /= cards_[i];
  }
  return states;
}

std::uint64_t AssignmentOdometer::rank(std::span<const int> states) const {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < cards_.size(); ++i) r = r * cards_[i] + static_cast<std::uint64_t>(states[i]);
  return r;
}

std::vector<Assignment> enumerate_assignments(const Network& net,
                                              std::span<const std::string> vars) {
  const auto ids = net.ids(vars);
  std::vector<std::size_t> cards;
  for (VarId v : ids) cards.push_back(net.cardinality(v));
  std::vector<Assignment> out;
  for (AssignmentOdometer it(cards); !it.done(); it.next()) {
    Assignment a;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      a[net.variable(ids[i]).name] = net.variable(ids[i]).states[it.current()[i]];
    }
    out.push_back(std::move(a));
  }
  return out;
}

EliminationOrder min_fill_order(std::vector<std::vector<bool>> adj, std::span<const VarId> vertices) {
  EliminationOrder result;
  std::vector<VarId> remaining(vertices.begin(), vertices.end());
  std::sort(remaining.begin(), remaining.end());
  auto neighbours = [&](VarId v) {
    std::vector<VarId> out;
    for (VarId u : remaining)
      if (u != v && adj[v][u]) out.push_back(u);
    return out;
  };

  while (!remaining.empty()) {
    std::size_t best_fill = std::numeric_limits<std::size_t>::max();
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const auto nb = neighbours(remaining[i]);
      std::size_t fill = 0;
      for (std::size_t a = 0; a < nb.size() && fill < best_fill; ++a)
        for (std::size_t b = a + 1; b < nb.size(); ++b)
          if (!adj[nb[a]][nb[b]]) ++fill;
      if (fill < best_fill) {
        best_fill = fill;
        best_pos = i;
        if (fill == 0) break;
      }
    }
    const VarId v = remaining[best_pos];
    const auto nb = neighbours(v);
    result.width = std::max(result.width, nb.size());
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) adj[nb[a]][nb[b]] = adj[nb[b]][nb[a]] = true;
    result.order.push_back(v);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
  }
  return result;
}

NetworkStats network_stats(const Network& net) {
  net.require_valid();
  NetworkStats stats;
  const std::size_t n = net.size();
  stats.variable_count = n;
  std::vector<std::vector<bool>> moral(n, std::vector<bool>(n, false));
  for (VarId v = 0; v < n; ++v) {
    stats.max_cardinality = std::max(stats.max_cardinality, net.cardinality(v));
    const auto parents = net.parents(v);
    stats.edge_count += parents.size();
    for (std::size_t i = 0; i < parents.size(); ++i) {
      moral[v][parents[i]] = moral[parents[i]][v] = true;
      for (std::size_t j = i + 1; j < parents.size(); ++j)
        moral[parents[i]][parents[j]] = moral[parents[j]][parents[i]] = true;
    }
  }
  std::vector<VarId> all(n);
  for (VarId v = 0; v < n; ++v) all[v] = v;
  stats.treewidth_upper_bound = min_fill_order(std::move(moral), all).width;
  return stats;
}

}  // namespace mapind
