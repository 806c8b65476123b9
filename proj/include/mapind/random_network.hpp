#pragma once

#include <cstdint>
#include <random>

#include "mapind/model.hpp"

namespace mapind {

struct RandomNetworkSpec {
  std::size_t nodes = 10;
  std::size_t max_parents = 3;
  std::size_t min_states = 2;
  std::size_t max_states = 2;
};

// Random DAG over v0..v{n-1}: each node draws up to max_parents parents from
// the nodes declared before it. CPT rows are uniform draws normalized to one.
Network random_network(std::mt19937_64& rng, const RandomNetworkSpec& spec);

}  // namespace mapind
