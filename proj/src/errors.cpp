#include "pbnrl/errors.hpp"

#include <sstream>

namespace pbnrl {

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << "invalid model (" << violations.size() << " violation" << (violations.size() == 1 ? "" : "s")
      << ")";
  for (const auto& v : violations) {
    out << "; " << v.message;
  }
  return out.str();
}

}  // namespace

InvalidModel::InvalidModel(std::vector<Violation> violations)
    : std::invalid_argument(describe(violations)), violations_(std::move(violations)) {}

StateSpaceTooLarge::StateSpaceTooLarge(std::size_t n_nodes, std::size_t max_nodes)
    : std::length_error("state space too large; use Monte-Carlo SSD (" + std::to_string(n_nodes) +
                        " nodes, exact cap is " + std::to_string(max_nodes) + ")"),
      n_nodes_(n_nodes),
      max_nodes_(max_nodes) {}

NotConverged::NotConverged(std::size_t iterations, double residual)
    : std::runtime_error("power iteration did not converge after " + std::to_string(iterations) +
                         " iterations (residual " + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

}  // namespace pbnrl
