#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbnrl/env.hpp"
#include "pbnrl/model.hpp"
#include "pbnrl/pbn.hpp"

namespace pbnrl {

/// Truth tables of the two-input gates, first input most significant.
inline const std::vector<std::uint8_t> kOr{0, 1, 1, 1};
inline const std::vector<std::uint8_t> kAnd{0, 0, 0, 1};
inline const std::vector<std::uint8_t> kXor{0, 1, 1, 0};

/// Ten-node OR/AND/XOR network; 1,296 realizations.
PbnModel fixture_n10();

/// Twenty-node OR/AND/XOR network.
PbnModel fixture_n20();

/// Seven-gene network (pirin, WNT5A, S100P, RET1, MART1, HADHB, STC2) with
/// fixed points 1001001, 0110110 and 0101111. Every node reads all seven
/// genes; with probability `pull` it moves towards the nearest fixed point,
/// otherwise it keeps its value.
PbnModel fixture_n7(double pull = 0.9);

/// Fixed points of fixture_n7, as printed state strings.
std::vector<std::string> n7_attractor_strings();

/// Synthetic 28-gene network for the subset-target protocol. Node 1 is the
/// control gene (pirin), node 2 the target gene (WNT5A), driven mainly by
/// node 1. The other nodes are random two- and three-input functions drawn
/// from `seed`.
PbnModel fixture_synthetic28(std::uint64_t seed = 28);

/// Attractor task whose undesired sets are the other attractors of `pbn`
/// (computed exactly when N <= max_nodes, otherwise left empty).
ControlTask make_attractor_task(const Pbn& pbn, std::string name, std::vector<NetworkState> desired,
                                std::size_t horizon, RewardParams rewards = {},
                                std::size_t max_nodes = 20);

/// Every node controllable, desired all-zeros, H = 11.
ControlTask task_n10(const Pbn& pbn);
/// Every node controllable, desired all-zeros, H = 100, r = 20.
ControlTask task_n20(const Pbn& pbn);
/// Every node controllable, desired `desired` (default 1001001), H = 7.
ControlTask task_n7(const Pbn& pbn, const std::string& desired = "1001001");
/// Control gene node 1 only; keep node 2 OFF; H = 100.
ControlTask task_subset_pirin(std::size_t n_nodes);

/// Names accepted by fixture_model / fixture_task.
std::vector<std::string> fixture_names();
PbnModel fixture_model(const std::string& name);
ControlTask fixture_task(const std::string& name, const Pbn& pbn);

}  // namespace pbnrl
