#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mapind {

using VarId = std::size_t;

// Partial or full binding of variable names to state names.
using Assignment = std::map<std::string, std::string>;

// State index per variable, kUnbound where the variable is free. Sized to the
// network's variable count.
using StateVector = std::vector<int>;
inline constexpr int kUnbound = -1;

struct Variable {
  std::string name;
  std::vector<std::string> states;
};

// rows[j] is the distribution of the child given the j-th joint parent
// assignment, parents enumerated row-major (last parent fastest).
struct Cpt {
  std::string child;
  std::vector<std::string> parents;
  std::vector<std::vector<double>> rows;
};

inline constexpr double kRowSumTolerance = 1e-9;

struct Violation {
  enum class Kind {
    kDuplicateVariable,
    kTooFewStates,
    kDuplicateState,
    kUnknownCptVariable,
    kMissingCpt,
    kDuplicateCpt,
    kUnknownParent,
    kDuplicateParent,
    kRowCountMismatch,
    kColumnCountMismatch,
    kEntryOutOfRange,
    kRowSum,
    kCycle,
  };

  Kind kind;
  std::string location;  // e.g. "cpt[A].row[3]"
  std::string message;
  double deviation = 0.0;  // |row sum - 1| for kRowSum
};

const char* to_string(Violation::Kind kind);

using ValidationReport = std::vector<Violation>;

// A discrete Bayesian network. Construction never throws on invariant
// violations; they are collected and exposed through validate_network().
// Operations that need a well-formed network call require_valid().
//
// Immutable after construction, so a shared instance can be queried from
// several threads.
class Network {
 public:
  Network() = default;
  Network(std::string name, std::vector<Variable> variables, std::vector<Cpt> cpts);

  const std::string& name() const { return name_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Cpt>& cpts() const { return cpts_; }

  std::size_t size() const { return variables_.size(); }
  bool valid() const { return violations_.empty(); }
  const ValidationReport& violations() const { return violations_; }

  // Throws NetworkError listing the violations.
  void require_valid() const;

  // Throws QueryError for unknown names.
  VarId id(const std::string& variable) const;
  std::optional<VarId> find(const std::string& variable) const;
  int state_index(VarId var, const std::string& state) const;

  const Variable& variable(VarId v) const { return variables_[v]; }
  std::size_t cardinality(VarId v) const { return variables_[v].states.size(); }

  // The following accessors are only meaningful on a valid network.
  std::span<const VarId> parents(VarId v) const { return parents_[v]; }
  std::span<const VarId> children(VarId v) const { return children_[v]; }
  // Row-major table: entry (row, state) at row * cardinality + state.
  std::span<const double> table(VarId v) const { return tables_[v]; }
  // Probability of child state given a full StateVector binding its parents.
  double entry(VarId v, const StateVector& states) const;

  StateVector bind(const Assignment& assignment) const;
  Assignment unbind(std::span<const VarId> vars, const StateVector& states) const;
  std::vector<VarId> ids(std::span<const std::string> names) const;

 private:
  void index();

  std::string name_;
  std::vector<Variable> variables_;
  std::vector<Cpt> cpts_;
  ValidationReport violations_;

  std::unordered_map<std::string, VarId> by_name_;
  std::vector<std::vector<VarId>> parents_;
  std::vector<std::vector<VarId>> children_;
  std::vector<std::vector<double>> tables_;
};

// Evidence E = e, hypothesis H, and focus set (R or the candidate pool I^P).
// Everything else is intermediate and summed out.
struct QueryPartition {
  Assignment evidence;
  std::vector<std::string> hypothesis;
  std::vector<std::string> focus;
};

// Throws QueryError unless the sets are disjoint, known, and H is non-empty.
// An empty focus is accepted here; callers that need one check it.
void validate_partition(const Network& net, const QueryPartition& partition);

struct NetworkStats {
  std::size_t variable_count = 0;
  std::size_t max_cardinality = 0;
  // Width of the min-fill elimination order on the moral graph; an upper
  // bound on treewidth, not the exact value.
  std::size_t treewidth_upper_bound = 0;
  std::size_t edge_count = 0;
};

ValidationReport validate_network(const Network& net);

// Parents precede children; ties broken by declaration order. Throws
// NetworkError on a cycle.
std::vector<std::string> topological_order(const Network& net);

// Standard d-separation of x from y given observed z.
bool d_separated(const Network& net, std::span<const std::string> x,
                 std::span<const std::string> y, std::span<const std::string> z);

// Odometer over the joint states of an ordered variable list, row-major with
// the last variable varying fastest.
class AssignmentOdometer {
 public:
  explicit AssignmentOdometer(std::vector<std::size_t> cardinalities);

  const std::vector<int>& current() const { return current_; }
  bool done() const { return done_; }
  void next();

  // Number of joint assignments; saturates at UINT64_MAX.
  std::uint64_t count() const;

  // States at a given row-major rank.
  std::vector<int> at(std::uint64_t rank) const;
  std::uint64_t rank(std::span<const int> states) const;

 private:
  std::vector<std::size_t> cards_;
  std::vector<int> current_;
  bool done_ = false;
};

std::vector<Assignment> enumerate_assignments(const Network& net,
                                              std::span<const std::string> vars);

NetworkStats network_stats(const Network& net);

// Min-fill elimination order over an undirected graph given as adjacency
// sets (ties broken by lowest vertex id). Returns the order and its width.
struct EliminationOrder {
  std::vector<VarId> order;
  std::size_t width = 0;
};
EliminationOrder min_fill_order(std::vector<std::vector<bool>> adjacency,
                                std::span<const VarId> vertices);

}  // namespace mapind
