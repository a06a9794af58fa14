#include "pbnrl/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "pbnrl/analysis.hpp"
#include "pbnrl/rng.hpp"

namespace pbnrl {
namespace {

struct GateRow {
  int a;
  int b;
  double p_or;
  double p_and;
  double p_xor;
};

NodeSpec gate_node(const GateRow& row) {
  NodeSpec node;
  node.inputs = {row.a - 1, row.b - 1};
  if (row.p_or > 0) node.functions.push_back({kOr, row.p_or});
  if (row.p_and > 0) node.functions.push_back({kAnd, row.p_and});
  if (row.p_xor > 0) node.functions.push_back({kXor, row.p_xor});
  return node;
}

PbnModel gate_model(std::string name, const std::vector<GateRow>& rows) {
  PbnModel model;
  model.name = std::move(name);
  model.n_nodes = rows.size();
  for (const auto& row : rows) {
    model.nodes.push_back(gate_node(row));
  }
  return model;
}

}  // namespace

PbnModel fixture_n10() {
  return gate_model("pbn-n10", {
                                   {1, 10, 1.00, 0.00, 0.00},
                                   {3, 8, 0.50, 0.25, 0.25},
                                   {8, 10, 0.71, 0.29, 0.00},
                                   {7, 8, 0.52, 0.48, 0.00},
                                   {9, 6, 0.36, 0.05, 0.59},
                                   {8, 2, 0.82, 0.15, 0.03},
                                   {10, 4, 0.48, 0.52, 0.00},
                                   {5, 9, 0.28, 0.45, 0.27},
                                   {10, 9, 1.00, 0.00, 0.00},
                                   {4, 7, 0.99, 0.01, 0.00},
                               });
}

PbnModel fixture_n20() {
  // Row 1 sums to 1.01 as printed; XOR is trimmed to 0.56 so the set is a
  // proper distribution.
  return gate_model("pbn-n20", {
                                   {3, 6, 0.39, 0.05, 0.56},
                                   {7, 14, 0.70, 0.00, 0.30},
                                   {3, 5, 1.00, 0.00, 0.00},
                                   {7, 4, 0.18, 0.82, 0.00},
                                   {9, 6, 0.00, 0.11, 0.89},
                                   {3, 11, 1.00, 0.00, 0.00},
                                   {11, 3, 1.00, 0.00, 0.00},
                                   {10, 9, 0.00, 0.44, 0.56},
                                   {14, 7, 0.00, 0.00, 1.00},
                                   {8, 19, 0.82, 0.09, 0.09},
                                   {8, 6, 0.00, 1.00, 0.00},
                                   {9, 4, 0.00, 1.00, 0.00},
                                   {14, 16, 1.00, 0.00, 0.00},
                                   {14, 18, 0.01, 0.98, 0.01},
                                   {19, 15, 0.00, 0.00, 1.00},
                                   {19, 2, 0.00, 1.00, 0.00},
                                   {18, 4, 1.00, 0.00, 0.00},
                                   {1, 20, 0.00, 1.00, 0.00},
                                   {2, 5, 0.00, 0.00, 1.00},
                                   {18, 20, 1.00, 0.00, 0.00},
                               });
}

std::vector<std::string> n7_attractor_strings() { return {"1001001", "0110110", "0101111"}; }

PbnModel fixture_n7(double pull) {
  if (!(pull > 0.0 && pull <= 1.0)) {
    throw std::invalid_argument("fixture_n7: pull must be in (0, 1]");
  }
  constexpr std::size_t n = 7;
  std::vector<NetworkState> fixed;
  for (const auto& s : n7_attractor_strings()) {
    fixed.push_back(NetworkState::from_string(s));
  }
  auto nearest = [&](const std::vector<bool>& bits) {
    std::size_t best = 0;
    std::size_t best_distance = n + 1;
    for (std::size_t k = 0; k < fixed.size(); ++k) {
      std::size_t d = 0;
      for (std::size_t j = 0; j < n; ++j) {
        d += bits[j] != fixed[k].get(j) ? 1U : 0U;
      }
      if (d < best_distance) {
        best_distance = d;
        best = k;
      }
    }
    return best;
  };

  PbnModel model;
  model.name = "melanoma-n7";
  model.n_nodes = n;
  for (std::size_t i = 0; i < n; ++i) {
    NodeSpec node;
    for (std::size_t j = 0; j < n; ++j) {
      node.inputs.push_back(static_cast<int>(j));
    }
    auto toward = truth_table(n, [&](const std::vector<bool>& bits) { return fixed[nearest(bits)].get(i); });
    auto keep = truth_table(n, [&](const std::vector<bool>& bits) { return static_cast<bool>(bits[i]); });
    node.functions.push_back({std::move(toward), pull});
    if (pull < 1.0) {
      node.functions.push_back({std::move(keep), 1.0 - pull});
    }
    model.nodes.push_back(std::move(node));
  }
  return model;
}

PbnModel fixture_synthetic28(std::uint64_t seed) {
  constexpr std::size_t n = 28;
  Rng rng(seed);
  PbnModel model;
  model.name = "synthetic-n28";
  model.n_nodes = n;

  NodeSpec pirin;
  pirin.inputs = {2, 3};
  pirin.functions = {{kOr, 0.9}, {kAnd, 0.1}};
  model.nodes.push_back(pirin);

  NodeSpec wnt5a;
  wnt5a.inputs = {0, 4};
  wnt5a.functions = {{{0, 0, 1, 1}, 0.85}, {kOr, 0.15}};
  model.nodes.push_back(wnt5a);

  using Gate = bool (*)(const std::vector<bool>&);
  static const std::array<Gate, 8> gates{
      [](const std::vector<bool>& b) { return std::any_of(b.begin(), b.end(), [](bool v) { return v; }); },
      [](const std::vector<bool>& b) { return std::all_of(b.begin(), b.end(), [](bool v) { return v; }); },
      [](const std::vector<bool>& b) { return std::count(b.begin(), b.end(), true) % 2 == 1; },
      [](const std::vector<bool>& b) { return !std::all_of(b.begin(), b.end(), [](bool v) { return v; }); },
      [](const std::vector<bool>& b) { return std::none_of(b.begin(), b.end(), [](bool v) { return v; }); },
      [](const std::vector<bool>& b) { return std::count(b.begin(), b.end(), true) % 2 == 0; },
      [](const std::vector<bool>& b) { return static_cast<bool>(b[0]); },
      [](const std::vector<bool>& b) { return 2 * std::count(b.begin(), b.end(), true) > std::ssize(b); },
  };

  for (std::size_t i = 2; i < n; ++i) {
    NodeSpec node;
    const std::size_t arity = 2 + rng.below(2);
    while (node.inputs.size() < arity) {
      const int candidate = static_cast<int>(rng.below(n));
      if (std::find(node.inputs.begin(), node.inputs.end(), candidate) == node.inputs.end()) {
        node.inputs.push_back(candidate);
      }
    }
    const std::size_t count = 1 + rng.below(3);
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      weights.push_back(0.2 + rng.uniform());
      total += weights.back();
    }
    double assigned = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const Gate gate = gates[rng.below(gates.size())];
      // Rounded to two decimals; the last function takes the remainder.
      double p = k + 1 == count ? 1.0 - assigned : std::max(0.01, std::round(100.0 * weights[k] / total) / 100.0);
      assigned += p;
      node.functions.push_back({truth_table(arity, gate), p});
    }
    model.nodes.push_back(std::move(node));
  }
  return model;
}

ControlTask make_attractor_task(const Pbn& pbn, std::string name, std::vector<NetworkState> desired,
                                std::size_t horizon, RewardParams rewards, std::size_t max_nodes) {
  ControlTask task;
  task.name = std::move(name);
  for (std::size_t i = 1; i <= pbn.size(); ++i) {
    task.controllable.push_back(i);
  }
  AttractorTarget target;
  for (auto& s : desired) {
    target.desired.insert(std::move(s));
  }
  if (pbn.size() <= max_nodes) {
    const AttractorSet set = find_attractors(pbn, max_nodes);
    for (const auto& attractor : set.attractors) {
      StateSet states;
      bool overlaps = false;
      for (auto index : attractor.states) {
        auto s = NetworkState::from_index(index, pbn.size());
        overlaps = overlaps || target.desired.contains(s);
        states.insert(std::move(s));
      }
      if (!overlaps) {
        target.undesired.push_back(std::move(states));
      }
    }
  }
  task.target = std::move(target);
  task.horizon = horizon;
  task.rewards = rewards;
  return task;
}

ControlTask task_n10(const Pbn& pbn) {
  return make_attractor_task(pbn, "n10-attractor", {NetworkState(pbn.size())}, 11);
}

ControlTask task_n20(const Pbn& pbn) {
  RewardParams rewards;
  rewards.success_reward = 20.0;
  return make_attractor_task(pbn, "n20-attractor", {NetworkState(pbn.size())}, 100, rewards);
}

ControlTask task_n7(const Pbn& pbn, const std::string& desired) {
  return make_attractor_task(pbn, "n7-attractor", {NetworkState::from_string(desired)}, 7);
}

ControlTask task_subset_pirin(std::size_t n_nodes) {
  if (n_nodes < 2) {
    throw std::invalid_argument("task_subset_pirin: needs at least two nodes");
  }
  ControlTask task;
  task.name = "subset-pirin";
  task.controllable = {1};
  task.target = SubsetTarget{2, false};
  task.horizon = 100;
  return task;
}

std::vector<std::string> fixture_names() { return {"n10", "n20", "n7", "synthetic28"}; }

PbnModel fixture_model(const std::string& name) {
  if (name == "n10") return fixture_n10();
  if (name == "n20") return fixture_n20();
  if (name == "n7") return fixture_n7();
  if (name == "synthetic28") return fixture_synthetic28();
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

ControlTask fixture_task(const std::string& name, const Pbn& pbn) {
  if (name == "n10") return task_n10(pbn);
  if (name == "n20") return task_n20(pbn);
  if (name == "n7") return task_n7(pbn);
  if (name == "synthetic28") return task_subset_pirin(pbn.size());
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

}  // namespace pbnrl
