#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mapind/model.hpp"
#include "mapind/rational.hpp"

namespace mapind {

enum class Method { kVariableElimination, kBruteForce };

struct InferenceOptions {
  Method method = Method::kVariableElimination;
  // Two candidates whose joint probabilities differ by at most this much are
  // reported as tied.
  double tie_tolerance = 1e-9;
  // Largest |Ω(H)| map_solve will enumerate.
  std::uint64_t max_hypothesis_space = std::uint64_t{1} << 20;
};

// Results below this are recomputed with per-factor rescaling.
inline constexpr double kUnderflowThreshold = 1e-300;

struct MapResult {
  Assignment assignment;         // h*
  double joint_probability = 0;  // Pr(h*, conditioning, e)
  double posterior = 0;          // Pr(h* | conditioning, e)
  bool tie = false;
  double runner_up_gap = 0;  // best minus second-best joint
  // Set when the candidates underflowed and were compared as log
  // probabilities; joint_probability and runner_up_gap are then log values.
  bool log_space = false;
};

// Chain-rule product for an assignment binding every variable.
double joint_probability(const Network& net, const Assignment& full);

// Pr(partial), summing every unbound variable out.
double marginal(const Network& net, const Assignment& partial,
                Method method = Method::kVariableElimination);

// Pr(target | evidence). Throws InfeasibleQueryError when Pr(evidence) = 0.
double posterior(const Network& net, const Assignment& target, const Assignment& evidence,
                 Method method = Method::kVariableElimination);

// argmax over Ω(H) of Pr(h, conditioning, evidence); first maximizer in
// canonical order wins.
MapResult map_solve(const Network& net, std::span<const std::string> hypothesis,
                    const Assignment& evidence, const Assignment& conditioning = {},
                    const InferenceOptions& options = {});

// Pr(h_star, evidence) > q, strictly and exactly.
bool map_threshold(const Network& net, const Assignment& h_star, const Assignment& evidence,
                   const Rational& q, Method method = Method::kVariableElimination);

// Index-level entry points used by the independence deciders.
namespace engine {

// Pr of the bound part of `states`.
double ve_marginal(const Network& net, const StateVector& states);
// log Pr of the bound part of `states`, computed with per-factor rescaling.
// -inf for probability zero.
double ve_log_marginal(const Network& net, const StateVector& states);
double brute_marginal(const Network& net, const StateVector& states);

// Full candidate scan behind map_solve. joints[rank] holds Pr(h_rank, bound
// states) for each h in canonical order (log values when log_space).
struct MapScan {
  std::vector<int> best;  // hypothesis states of h*
  std::uint64_t best_rank = 0;
  std::vector<double> joints;
  double total = 0;  // Pr(bound states); log when log_space
  bool tie = false;
  double runner_up_gap = 0;
  bool log_space = false;
};

// Throws InfeasibleQueryError if the bound states have probability zero.
MapScan scan_map(const Network& net, std::span<const VarId> hypothesis, const StateVector& bound,
                 const InferenceOptions& options);

}  // namespace engine

}  // namespace mapind
