#pragma once

#include <cstdint>
#include <vector>

#include "pbnrl/model.hpp"
#include "pbnrl/pbn.hpp"
#include "pbnrl/rng.hpp"

namespace pbnrl::test {

/// Random valid model: 1-3 inputs and 1-3 functions per node, or a
/// stochastic table with probability 1/4.
inline PbnModel random_model(std::size_t n, Rng& rng) {
  PbnModel m;
  m.name = "random";
  m.n_nodes = n;
  for (std::size_t i = 0; i < n; ++i) {
    NodeSpec node;
    const std::size_t k = 1 + rng.below(std::min<std::size_t>(3, n));
    std::vector<int> pool(n);
    for (std::size_t j = 0; j < n; ++j) pool[j] = static_cast<int>(j);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t pick = j + rng.below(n - j);
      std::swap(pool[j], pool[pick]);
      node.inputs.push_back(pool[j]);
    }
    const std::size_t rows = std::size_t{1} << k;
    if (rng.below(4) == 0) {
      for (std::size_t r = 0; r < rows; ++r) node.stochastic_table.push_back(rng.uniform());
    } else {
      const std::size_t f = 1 + rng.below(3);
      double left = 1.0;
      for (std::size_t j = 0; j < f; ++j) {
        BooleanFunction fn;
        for (std::size_t r = 0; r < rows; ++r) fn.table.push_back(static_cast<std::uint8_t>(rng.below(2)));
        fn.probability = j + 1 == f ? left : left * (0.2 + 0.6 * rng.uniform());
        left -= fn.probability;
        node.functions.push_back(fn);
      }
    }
    m.nodes.push_back(node);
  }
  return m;
}

inline std::size_t combination_of(const NodeSpec& node, std::uint64_t index, std::size_t n) {
  std::size_t c = 0;
  for (int in : node.inputs) {
    c = (c << 1) | ((index >> (n - 1 - static_cast<std::size_t>(in))) & 1U);
  }
  return c;
}

/// P(from -> to) by enumerating every realization (one function per node);
/// stochastic-table nodes contribute their Bernoulli factor directly.
inline double brute_force_probability(const PbnModel& m, std::uint64_t from, std::uint64_t to) {
  const std::size_t n = m.n_nodes;
  std::vector<std::size_t> choice(n, 0);
  double total = 0.0;
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < n && p > 0.0; ++i) {
      const NodeSpec& node = m.nodes[i];
      const std::size_t c = combination_of(node, from, n);
      const bool bit = (to >> (n - 1 - i)) & 1U;
      if (node.functions.empty()) {
        p *= bit ? node.stochastic_table[c] : 1.0 - node.stochastic_table[c];
      } else {
        const BooleanFunction& f = node.functions[choice[i]];
        p *= f.probability * ((f.table[c] != 0) == bit ? 1.0 : 0.0);
      }
    }
    total += p;
    std::size_t i = 0;
    for (; i < n; ++i) {
      const std::size_t width = std::max<std::size_t>(1, m.nodes[i].functions.size());
      if (++choice[i] < width) break;
      choice[i] = 0;
    }
    if (i == n) break;
  }
  return total;
}

}  // namespace pbnrl::test
