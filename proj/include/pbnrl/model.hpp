#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pbnrl/errors.hpp"

namespace pbnrl {

/// A deterministic Boolean function given by its truth table. Entry x is the
/// output for input combination x, where the first listed input is the most
/// significant bit of x.
struct BooleanFunction {
  std::vector<std::uint8_t> table;
  double probability = 1.0;
};

/// Update rule of one node: either a probabilistic set of Boolean functions,
/// or a stochastic table holding P(output = 1 | x) per input combination.
struct NodeSpec {
  std::vector<int> inputs;  // zero-based node indices
  std::vector<BooleanFunction> functions;
  std::vector<double> stochastic_table;

  bool uses_stochastic_table() const noexcept { return functions.empty(); }
  std::size_t arity() const noexcept { return inputs.size(); }
  std::size_t combinations() const noexcept { return std::size_t{1} << inputs.size(); }
};

/// Raw network description. May be invalid; see validate_model.
struct PbnModel {
  std::string name;
  std::size_t n_nodes = 0;
  std::vector<NodeSpec> nodes;
};

/// Returns every broken invariant. Empty iff the model is usable.
std::vector<Violation> validate_model(const PbnModel& model);

/// Number of realizations (product of per-node function counts) as an exact
/// decimal string. Stochastic-table nodes count as one realization each.
std::string realization_count(const PbnModel& model);

/// Builds a truth table from a predicate over the input bits.
template <class F>
std::vector<std::uint8_t> truth_table(std::size_t arity, F&& f) {
  std::vector<std::uint8_t> table(std::size_t{1} << arity);
  std::vector<bool> bits(arity);
  for (std::size_t x = 0; x < table.size(); ++x) {
    for (std::size_t j = 0; j < arity; ++j) {
      bits[j] = (x >> (arity - 1 - j)) & 1U;
    }
    table[x] = f(bits) ? 1 : 0;
  }
  return table;
}

/// Per-combination P(output = 1) of a node in either form.
std::vector<double> output_probabilities(const NodeSpec& node);

/// Converts a function-set node to the equivalent stochastic table (same
/// per-step output distribution).
NodeSpec to_stochastic_table(const NodeSpec& node);

}  // namespace pbnrl
