#include "pbnrl/pbn.hpp"

#include <algorithm>
#include <stdexcept>

namespace pbnrl {

Pbn::Pbn(PbnModel model) : model_(std::move(model)) {
  if (auto violations = validate_model(model_); !violations.empty()) {
    throw InvalidModel(std::move(violations));
  }
  nodes_.reserve(model_.nodes.size());
  for (const NodeSpec& spec : model_.nodes) {
    CompiledNode node;
    node.inputs = spec.inputs;
    node.stochastic_table = spec.uses_stochastic_table();
    node.prob_one = output_probabilities(spec);
    const std::size_t combos = spec.combinations();
    node.can_zero.assign(combos, 0);
    node.can_one.assign(combos, 0);
    if (node.stochastic_table) {
      for (std::size_t x = 0; x < combos; ++x) {
        node.can_zero[x] = node.prob_one[x] < 1.0;
        node.can_one[x] = node.prob_one[x] > 0.0;
      }
    } else {
      double total = 0.0;
      for (const auto& f : spec.functions) {
        total += f.probability;
      }
      double running = 0.0;
      for (const auto& f : spec.functions) {
        running += f.probability;
        node.cumulative.push_back(running / total);
        node.tables.push_back(f.table);
        for (std::size_t x = 0; x < combos; ++x) {
          (f.table[x] != 0 ? node.can_one[x] : node.can_zero[x]) = 1;
        }
      }
      node.cumulative.back() = 1.0;
    }
    nodes_.push_back(std::move(node));
  }
}

std::size_t Pbn::combination(const CompiledNode& node, const NetworkState& state) const noexcept {
  std::size_t x = 0;
  for (int input : node.inputs) {
    x = (x << 1) | (state.get(static_cast<std::size_t>(input)) ? 1U : 0U);
  }
  return x;
}

std::size_t Pbn::combination(const CompiledNode& node, std::uint64_t index) const noexcept {
  const std::size_t n = nodes_.size();
  std::size_t x = 0;
  for (int input : node.inputs) {
    x = (x << 1) | ((index >> (n - 1 - static_cast<std::size_t>(input))) & 1U);
  }
  return x;
}

void Pbn::step_into(const NetworkState& from, NetworkState& to, Rng& rng) const {
  if (from.size() != nodes_.size()) {
    throw std::invalid_argument("Pbn::step: state has " + std::to_string(from.size()) +
                                " nodes, network has " + std::to_string(nodes_.size()));
  }
  if (to.size() != from.size()) {
    to = NetworkState(from.size());
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const CompiledNode& node = nodes_[i];
    const std::size_t x = combination(node, from);
    bool value = false;
    if (node.stochastic_table) {
      value = rng.uniform() < node.prob_one[x];
    } else if (node.tables.size() == 1) {
      value = node.tables.front()[x] != 0;
    } else {
      const double u = rng.uniform();
      const auto it = std::upper_bound(node.cumulative.begin(), node.cumulative.end(), u);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - node.cumulative.begin()),
                                           node.tables.size() - 1);
      value = node.tables[k][x] != 0;
    }
    to.set(i, value);
  }
}

NetworkState Pbn::step(const NetworkState& state, Rng& rng) const {
  NetworkState next(state.size());
  step_into(state, next, rng);
  return next;
}

double Pbn::transition_probability(const NetworkState& state, const NetworkState& next) const {
  if (state.size() != nodes_.size() || next.size() != nodes_.size()) {
    throw std::invalid_argument("Pbn::transition_probability: state size mismatch");
  }
  double p = 1.0;
  for (std::size_t i = 0; i < nodes_.size() && p > 0.0; ++i) {
    const double one = nodes_[i].prob_one[combination(nodes_[i], state)];
    p *= next.get(i) ? one : 1.0 - one;
  }
  return p;
}

std::vector<double> Pbn::next_bit_probabilities(const NetworkState& state) const {
  if (state.size() != nodes_.size()) {
    throw std::invalid_argument("Pbn::next_bit_probabilities: state size mismatch");
  }
  std::vector<double> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out[i] = nodes_[i].prob_one[combination(nodes_[i], state)];
  }
  return out;
}

void Pbn::successor_support(std::uint64_t index, std::uint64_t& fixed,
                            std::uint64_t& free_mask) const {
  const std::size_t n = nodes_.size();
  fixed = 0;
  free_mask = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const CompiledNode& node = nodes_[i];
    const std::size_t x = combination(node, index);
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - i);
    if (node.can_one[x] && node.can_zero[x]) {
      free_mask |= bit;
    } else if (node.can_one[x]) {
      fixed |= bit;
    }
  }
}

double Pbn::next_bit_probability(std::uint64_t index, std::size_t node) const {
  return nodes_[node].prob_one[combination(nodes_[node], index)];
}

}  // namespace pbnrl
