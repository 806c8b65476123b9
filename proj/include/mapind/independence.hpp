#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapind/inference.hpp"
#include "mapind/model.hpp"
#include "mapind/rational.hpp"

namespace mapind {

enum class IndependenceMode { kStrong, kWeak, kMaximum, kThreshold, kQuantify };

const char* to_string(IndependenceMode mode);

struct IndependenceOptions {
  InferenceOptions inference;
  // Largest |Ω(R)| a single decider will enumerate.
  std::uint64_t max_focus_space = std::uint64_t{1} << 20;
  // Largest number of size-k subsets the maximum search may visit.
  std::uint64_t max_subsets = std::uint64_t{1} << 16;
  // Rows kept in IndependenceReport::per_assignment. Zero disables the table.
  std::size_t table_limit = 0;
  // Stop at the first counterexample. Ignored when a full table or
  // quantification is requested.
  bool short_circuit = true;
  // Fail with InfeasibleQueryError on a zero-probability (r, e) instead of
  // skipping it.
  bool strict_zeros = false;
  // Worker threads for the Ω(R) sweep; 0 or 1 runs sequentially.
  unsigned workers = 1;
  // Skip supersets of known failing subsets in the maximum search.
  bool prune_supersets = true;
};

// One row of the per-assignment table: r, the MAP under r (absent for the
// threshold variant), and Pr(h*, r, e).
struct AssignmentRow {
  Assignment focus;
  std::optional<Assignment> map;
  double joint_h_star = 0;
  bool skipped = false;  // Pr(r, e) = 0
  bool tie = false;
};

struct Quantification {
  double mass = 0;        // Σ Pr(r | e) over r whose MAP equals h*
  double proportion = 0;  // fraction of Ω(R) whose MAP equals h*
  double mean_hamming = 0;  // unweighted mean over Ω(R)
};

inline constexpr const char* kTieWarning = "tie-ambiguous";

struct IndependenceReport {
  IndependenceMode mode = IndependenceMode::kStrong;
  bool verdict = false;
  Assignment h_star;
  std::optional<Assignment> counterexample;
  std::optional<Assignment> counterexample_map;
  std::vector<AssignmentRow> per_assignment;
  bool table_truncated = false;
  bool ties_encountered = false;
  std::vector<Assignment> skipped;  // zero-probability r, in canonical order
  std::optional<Quantification> metrics;
  std::vector<std::string> warnings;
  std::uint64_t map_computations = 0;

  // Maximum mode: the qualifying subset (empty when the verdict is false),
  // plus search counters.
  std::vector<std::string> subset;
  std::uint64_t subsets_tested = 0;
  std::uint64_t subsets_pruned = 0;

  // Threshold mode: min over r of Pr(h*, r, e).
  std::optional<double> min_joint;

  std::chrono::nanoseconds elapsed{0};
};

IndependenceReport strong_map_independence(const Network& net, const QueryPartition& partition,
                                           const IndependenceOptions& options = {});

IndependenceReport weak_map_independence(const Network& net, const QueryPartition& partition,
                                         const IndependenceOptions& options = {});

// Searches the focus set (the candidate pool I^P) for a subset of size at
// least k from which H is strongly MAP-independent.
IndependenceReport maximum_map_independence(const Network& net, const QueryPartition& partition,
                                            std::size_t k, const IndependenceOptions& options = {});

// Pr(h_star, r, e) > s for every r. h_star need not be the MAP.
IndependenceReport threshold_map_independence(const Network& net, const Assignment& h_star,
                                              const QueryPartition& partition, const Rational& s,
                                              const IndependenceOptions& options = {});

// Full sweep of Ω(R) against h* = MAP(H | e); the report carries metrics and
// the strong verdict.
IndependenceReport quantify(const Network& net, const QueryPartition& partition,
                            const IndependenceOptions& options = {});

struct RelevanceVerdict {
  std::string variable;
  bool relevant = false;
  std::optional<Assignment> counterexample;
  bool tie = false;
};

struct RelevancePartition {
  std::vector<std::string> relevant;
  std::vector<std::string> irrelevant;
  std::vector<RelevanceVerdict> justification;
};

enum class RelevanceMode { kWeak, kStrongSingleton };

// Classifies each candidate by singleton MAP-(in)dependence. The two modes
// coincide for singletons; both are accepted for symmetry with the deciders.
RelevancePartition relevance_partition(const Network& net, const Assignment& evidence,
                                       const std::vector<std::string>& hypothesis,
                                       const std::vector<std::string>& candidates,
                                       RelevanceMode mode = RelevanceMode::kWeak,
                                       const IndependenceOptions& options = {});

}  // namespace mapind
