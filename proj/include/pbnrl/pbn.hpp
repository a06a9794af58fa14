#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pbnrl/model.hpp"
#include "pbnrl/rng.hpp"
#include "pbnrl/state.hpp"

namespace pbnrl {

/// A validated PBN, compiled for simulation and exact analysis.
///
/// Immutable after construction; all members are const and safe to call from
/// several threads as long as each thread owns its Rng.
class Pbn {
 public:
  /// Throws InvalidModel when validate_model reports anything.
  explicit Pbn(PbnModel model);

  const PbnModel& model() const noexcept { return model_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// One synchronous update: every node independently selects one of its
  /// functions (or samples its stochastic table) from the same pre-state.
  NetworkState step(const NetworkState& state, Rng& rng) const;
  void step_into(const NetworkState& from, NetworkState& to, Rng& rng) const;

  /// P(state -> next) as the product of independent per-node factors.
  double transition_probability(const NetworkState& state, const NetworkState& next) const;

  /// P(x_i(t+1) = 1 | state) for every node.
  std::vector<double> next_bit_probabilities(const NetworkState& state) const;

  // Integer-encoded helpers for the exact oracles (N <= 64, node 1 = MSB).

  /// Bits every successor shares (`fixed`) and nodes free to take both values
  /// (`free_mask`) from `index`; successors are exactly fixed | subset(free).
  void successor_support(std::uint64_t index, std::uint64_t& fixed, std::uint64_t& free_mask) const;
  double next_bit_probability(std::uint64_t index, std::size_t node) const;

 private:
  struct CompiledNode {
    std::vector<int> inputs;
    std::vector<double> cumulative;                 // function-set form, normalized
    std::vector<std::vector<std::uint8_t>> tables;  // function-set form
    std::vector<double> prob_one;                   // per combination, both forms
    std::vector<std::uint8_t> can_zero;
    std::vector<std::uint8_t> can_one;
    bool stochastic_table = false;
  };

  std::size_t combination(const CompiledNode& node, const NetworkState& state) const noexcept;
  std::size_t combination(const CompiledNode& node, std::uint64_t index) const noexcept;

  PbnModel model_;
  std::vector<CompiledNode> nodes_;
};

}  // namespace pbnrl
