#pragma once

#include <span>
#include <vector>

#include "mapind/model.hpp"

namespace mapind {

// Dense non-negative table over an ascending list of variables, row-major
// with the last scope variable varying fastest.
struct Factor {
  std::vector<VarId> scope;
  std::vector<std::size_t> cards;
  std::vector<double> values;

  bool is_constant() const { return scope.empty(); }
  bool contains(VarId v) const;
};

// CPT of `var` with every variable bound in `states` fixed to its value.
Factor cpt_factor(const Network& net, VarId var, const StateVector& states);

// Pointwise product of `factors`, optionally summing `eliminate` out of the
// result in the same pass.
Factor combine(std::span<const Factor* const> factors, std::optional<VarId> eliminate);

// Divides the table by its maximum entry and returns that maximum (0 for an
// all-zero table, which is left untouched).
double normalize_max(Factor& f);

}  // namespace mapind
