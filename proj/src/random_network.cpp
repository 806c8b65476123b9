#include "mapind/random_network.hpp"

#include <algorithm>
#include <numeric>

namespace mapind {

Network random_network(std::mt19937_64& rng, const RandomNetworkSpec& spec) {
  std::uniform_int_distribution<std::size_t> states_dist(spec.min_states, spec.max_states);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Variable> vars;
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    Variable v{"v" + std::to_string(i), {}};
    const std::size_t k = states_dist(rng);
    for (std::size_t s = 0; s < k; ++s) v.states.push_back("s" + std::to_string(s));
    vars.push_back(std::move(v));
  }

  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    std::vector<std::size_t> earlier(i);
    std::iota(earlier.begin(), earlier.end(), 0);
    std::shuffle(earlier.begin(), earlier.end(), rng);
    std::uniform_int_distribution<std::size_t> count(0, std::min(spec.max_parents, i));
    earlier.resize(count(rng));
    std::sort(earlier.begin(), earlier.end());

    Cpt cpt{vars[i].name, {}, {}};
    std::size_t rows = 1;
    for (std::size_t p : earlier) {
      cpt.parents.push_back(vars[p].name);
      rows *= vars[p].states.size();
    }
    const std::size_t card = vars[i].states.size();
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(card);
      double sum = 0.0;
      for (double& x : row) sum += (x = 0.01 + unit(rng));
      for (double& x : row) x /= sum;
      cpt.rows.push_back(std::move(row));
    }
    cpts.push_back(std::move(cpt));
  }
  return Network("random", std::move(vars), std::move(cpts));
}

}  // namespace mapind
