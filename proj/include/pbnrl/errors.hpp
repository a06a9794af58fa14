#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbnrl {

/// One broken model invariant, tied to the (1-based) node that breaks it.
/// `node` is 0 for model-level rules.
struct Violation {
  std::size_t node = 0;
  std::string rule;
  std::string message;
};

class InvalidModel : public std::invalid_argument {
 public:
  explicit InvalidModel(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Raised by the exact oracles when 2^N states exceed the configured cap.
class StateSpaceTooLarge : public std::length_error {
 public:
  StateSpaceTooLarge(std::size_t n_nodes, std::size_t max_nodes);
  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t max_nodes() const noexcept { return max_nodes_; }

 private:
  std::size_t n_nodes_;
  std::size_t max_nodes_;
};

class NotConverged : public std::runtime_error {
 public:
  NotConverged(std::size_t iterations, double residual);
  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

}  // namespace pbnrl
