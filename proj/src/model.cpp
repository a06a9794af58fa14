#include "pbnrl/model.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>

namespace pbnrl {

namespace {

constexpr std::size_t kMaxArity = 20;
constexpr double kSumTolerance = 1e-9;

std::string format_real(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

}  // namespace

std::vector<Violation> validate_model(const PbnModel& model) {
  std::vector<Violation> out;
  auto report = [&](std::size_t node, std::string rule, std::string message) {
    if (node != 0) {
      message = "node " + std::to_string(node) + ": " + message;
    }
    out.push_back({node, std::move(rule), std::move(message)});
  };

  if (model.n_nodes == 0) {
    report(0, "n_nodes", "n_nodes must be positive");
  }
  if (model.nodes.size() != model.n_nodes) {
    report(0, "node count",
           "model declares " + std::to_string(model.n_nodes) + " nodes but lists " +
               std::to_string(model.nodes.size()));
  }

  const auto n = static_cast<long long>(model.nodes.size());
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    const NodeSpec& node = model.nodes[i];
    const std::size_t id = i + 1;

    for (int input : node.inputs) {
      if (input < 0 || input >= n) {
        report(id, "input range",
               "input " + std::to_string(static_cast<long long>(input) + 1) + " out of range [1, " +
                   std::to_string(n) + "]");
      }
    }
    if (node.arity() > kMaxArity) {
      report(id, "arity", "arity " + std::to_string(node.arity()) + " exceeds " +
                              std::to_string(kMaxArity));
      continue;
    }

    const std::size_t combos = node.combinations();
    const bool has_functions = !node.functions.empty();
    const bool has_table = !node.stochastic_table.empty();
    if (has_functions && has_table) {
      report(id, "form", "both functions and stochastic_table given");
    }
    if (!has_functions && !has_table) {
      report(id, "form", "no functions or stochastic_table given");
      continue;
    }

    if (has_functions) {
      double sum = 0.0;
      for (std::size_t k = 0; k < node.functions.size(); ++k) {
        const auto& f = node.functions[k];
        const std::string which = "function " + std::to_string(k + 1);
        if (f.table.size() != combos) {
          report(id, "table length",
                 which + " has truth table of length " + std::to_string(f.table.size()) +
                     ", expected " + std::to_string(combos));
        }
        for (auto bit : f.table) {
          if (bit > 1) {
            report(id, "table values", which + " has a non-binary truth-table entry");
            break;
          }
        }
        if (!(f.probability > 0.0 && f.probability <= 1.0)) {
          report(id, "probability range",
                 which + " probability " + format_real(f.probability) + " not in (0, 1]");
        }
        sum += f.probability;
      }
      if (!(std::abs(sum - 1.0) <= kSumTolerance)) {
        report(id, "probability sum", "probabilities sum to " + format_real(sum));
      }
    } else {
      if (node.stochastic_table.size() != combos) {
        report(id, "table length",
               "stochastic_table has length " + std::to_string(node.stochastic_table.size()) +
                   ", expected " + std::to_string(combos));
      }
      for (double p : node.stochastic_table) {
        if (!(p >= 0.0 && p <= 1.0)) {
          report(id, "probability range",
                 "stochastic_table entry " + format_real(p) + " not in [0, 1]");
          break;
        }
      }
    }
  }
  return out;
}

std::string realization_count(const PbnModel& model) {
  boost::multiprecision::cpp_int count = 1;
  for (const auto& node : model.nodes) {
    count *= node.functions.empty() ? 1 : node.functions.size();
  }
  return count.str();
}

std::vector<double> output_probabilities(const NodeSpec& node) {
  if (node.uses_stochastic_table()) {
    return node.stochastic_table;
  }
  const std::size_t combos = node.combinations();
  double total = 0.0;
  for (const auto& f : node.functions) {
    total += f.probability;
  }
  std::vector<double> one(combos, 0.0);
  std::vector<double> zero(combos, 0.0);
  for (const auto& f : node.functions) {
    for (std::size_t x = 0; x < combos; ++x) {
      (f.table[x] != 0 ? one[x] : zero[x]) += f.probability;
    }
  }
  // Normalizing by the total keeps deterministic outputs at exactly 0 or 1
  // even when the listed probabilities sum to 1 only within rounding.
  for (std::size_t x = 0; x < combos; ++x) {
    one[x] = zero[x] == 0.0 ? 1.0 : one[x] / total;
  }
  return one;
}

NodeSpec to_stochastic_table(const NodeSpec& node) {
  NodeSpec out;
  out.inputs = node.inputs;
  out.stochastic_table = output_probabilities(node);
  return out;
}

}  // namespace pbnrl
