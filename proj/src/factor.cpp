#include "mapind/factor.hpp"

#include <algorithm>

namespace mapind {

bool Factor::contains(VarId v) const { return std::binary_search(scope.begin(), scope.end(), v); }

Factor cpt_factor(const Network& net, VarId var, const StateVector& states) {
  Factor f;
  std::vector<VarId> family(net.parents(var).begin(), net.parents(var).end());
  family.push_back(var);
  for (VarId v : family) {
    if (states[v] == kUnbound) f.scope.push_back(v);
  }
  std::sort(f.scope.begin(), f.scope.end());
  for (VarId v : f.scope) f.cards.push_back(net.cardinality(v));

  StateVector local = states;
  AssignmentOdometer it(f.cards);
  f.values.reserve(it.count());
  for (; !it.done(); it.next()) {
    for (std::size_t i = 0; i < f.scope.size(); ++i) local[f.scope[i]] = it.current()[i];
    f.values.push_back(net.entry(var, local));
  }
  return f;
}

Factor combine(std::span<const Factor* const> factors, std::optional<VarId> eliminate) {
  std::vector<VarId> all;
  std::vector<std::size_t> all_cards;
  for (const Factor* f : factors) {
    for (std::size_t i = 0; i < f->scope.size(); ++i) {
      auto pos = std::lower_bound(all.begin(), all.end(), f->scope[i]);
      if (pos == all.end() || *pos != f->scope[i]) {
        all_cards.insert(all_cards.begin() + (pos - all.begin()), f->cards[i]);
        all.insert(pos, f->scope[i]);
      }
    }
  }

  Factor out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (eliminate && all[i] == *eliminate) continue;
    out.scope.push_back(all[i]);
    out.cards.push_back(all_cards[i]);
  }
  std::size_t out_size = 1;
  for (auto c : out.cards) out_size *= c;
  out.values.assign(out_size, 0.0);

  // Stride of each variable in `all` within each operand and within `out`;
  // zero where the variable is absent.
  const std::size_t k = all.size();
  auto strides_for = [&](const std::vector<VarId>& scope, const std::vector<std::size_t>& cards) {
    std::vector<std::size_t> strides(k, 0);
    std::size_t s = 1;
    for (std::size_t i = scope.size(); i-- > 0;) {
      const auto pos = static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), scope[i]) - all.begin());
      strides[pos] = s;
      s *= cards[i];
    }
    return strides;
  };
  std::vector<std::vector<std::size_t>> operand_strides;
  operand_strides.reserve(factors.size());
  for (const Factor* f : factors) operand_strides.push_back(strides_for(f->scope, f->cards));
  const std::vector<std::size_t> out_strides = strides_for(out.scope, out.cards);

  std::vector<std::size_t> idx(factors.size(), 0);
  std::size_t out_idx = 0;
  std::vector<std::size_t> counter(k, 0);
  for (;;) {
    double p = 1.0;
    for (std::size_t f = 0; f < factors.size(); ++f) p *= factors[f]->values[idx[f]];
    out.values[out_idx] += p;

    std::size_t d = k;
    while (d-- > 0) {
      if (++counter[d] < all_cards[d]) {
        for (std::size_t f = 0; f < factors.size(); ++f) idx[f] += operand_strides[f][d];
        out_idx += out_strides[d];
        break;
      }
      counter[d] = 0;
      const std::size_t back = all_cards[d] - 1;
      for (std::size_t f = 0; f < factors.size(); ++f) idx[f] -= operand_strides[f][d] * back;
      out_idx -= out_strides[d] * back;
    }
    if (d == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

double normalize_max(Factor& f) {
  const double m = f.values.empty() ? 0.0 : *std::max_element(f.values.begin(), f.values.end());
  if (m > 0.0) {
    for (double& v : f.values) v /= m;
  }
  return m;
}

}  // namespace mapind
