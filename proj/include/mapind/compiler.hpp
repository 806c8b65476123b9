#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapind/model.hpp"
#include "mapind/rational.hpp"

namespace mapind {

// Propositional formula tree. Binary operators always have exactly two
// children; `not` has one; variables none.
struct Formula {
  enum class Kind { kVariable, kNot, kAnd, kOr };

  Kind kind = Kind::kVariable;
  std::string name;  // variables only
  std::vector<Formula> children;

  static Formula variable(std::string name);
  static Formula negation(Formula operand);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);

  // Distinct variable names in order of first occurrence.
  std::vector<std::string> variables() const;
  // Truth value under `values`, indexed like variables().
  bool evaluate(const std::vector<std::string>& vars, const std::vector<bool>& values) const;

  friend bool operator==(const Formula&, const Formula&) = default;
};

// Grammar, whitespace-insensitive:
//   expr   := term ('|' term)*
//   term   := factor ('&' factor)*
//   factor := '!' factor | '(' expr ')' | identifier
// '&' and '|' are left-associative. The UTF-8 connectives ¬ ∧ ∨ are accepted
// as aliases. Throws ParseError with a byte offset.
Formula parse_formula(const std::string& text);

// Canonical ASCII rendering with only the parentheses the grammar needs.
std::string print_formula(const Formula& f);

inline constexpr std::size_t kModelCountLimit = 24;

// Exhaustive truth-table count. Throws CapacityError beyond kModelCountLimit
// variables.
std::uint64_t count_models(const Formula& f);

// Threshold query emitted alongside a compiled network: is Pr(h*, r) > s for
// every r ∈ Ω(R), with no evidence?
struct ThresholdQuery {
  Assignment h_star;
  std::vector<std::string> focus;
  Rational s;
};

struct CompiledInstance {
  Network network;
  std::string phi_node;
  std::vector<std::string> variable_nodes;
  std::optional<ThresholdQuery> query;
};

// One uniform root per formula variable (named after the variable) and one
// deterministic node per operator occurrence, named <op>_<preorder index>.
// States are ordered {T, F}.
CompiledInstance compile_network(const Formula& f);

// Majority-under-every-A query: R = the A variables, H = {V_φ}, h* = T,
// s = 2^-(|A|+1). `a_set` must be a non-empty proper subset of the formula's
// variables.
CompiledInstance build_amajsat_instance(const Formula& f, const std::vector<std::string>& a_set);

}  // namespace mapind
