#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "pbnrl/pbn.hpp"
#include "pbnrl/rng.hpp"
#include "pbnrl/state.hpp"

namespace pbnrl {

using StateSet = std::unordered_set<NetworkState, NetworkStateHash>;

struct RewardParams {
  double success_reward = 5.0;
  double undesirable_attractor_penalty = -2.0;
  double step_penalty = -1.0;
  double subset_good = 10.0;
  double subset_bad = -10.0;
  double action_cost = 1.0;
};

/// Reach one state of `desired`; landing in any `undesired` attractor costs
/// more than an ordinary step. An empty `undesired` list gives the
/// desired-only scheme (every other state is an ordinary step).
struct AttractorTarget {
  StateSet desired;
  std::vector<StateSet> undesired;
};

/// Keep the network in states where node `node` (1-based) equals `value`.
struct SubsetTarget {
  std::size_t node = 1;
  bool value = false;

  bool satisfied_by(const NetworkState& s) const { return s.get(node - 1) == value; }
};

struct ControlTask {
  std::string name;
  std::vector<std::size_t> controllable;  // 1-based node numbers
  std::variant<AttractorTarget, SubsetTarget> target;
  std::size_t horizon = 1;
  RewardParams rewards;

  bool attractor_mode() const noexcept { return std::holds_alternative<AttractorTarget>(target); }
  bool is_desired(const NetworkState& s) const;
};

/// Problems with the task relative to an n-node network; empty when usable.
std::vector<std::string> validate_task(const ControlTask& task, std::size_t n_nodes);

/// Actions are 0 (no intervention) plus one per controllable node.
std::size_t action_space_size(const ControlTask& task);

/// Node flipped by `action` (1-based, 0 for the no-op). Throws on an invalid action.
std::size_t action_node(const ControlTask& task, std::size_t action);

/// Reward for landing in `next` after taking `action`.
double transition_reward(const ControlTask& task, std::size_t action, const NetworkState& next);

enum class TerminalReason { none, reached_target, horizon_exhausted };

struct StepOutcome {
  NetworkState next_state;
  double reward = 0.0;
  bool terminal = false;
  TerminalReason reason = TerminalReason::none;
};

const char* to_string(TerminalReason reason);

/// Episodic MDP over a PBN: intervention, then one natural step.
///
/// Single-writer; the network itself is shared read-only.
class ControlEnv {
 public:
  ControlEnv(const Pbn& pbn, ControlTask task);

  /// Uniform random initial state.
  const NetworkState& reset(Rng& rng);
  /// Evaluation variant with an explicit initial state.
  const NetworkState& reset(NetworkState initial);

  StepOutcome step(std::size_t action, Rng& rng);

  const NetworkState& state() const noexcept { return state_; }
  std::size_t steps_taken() const noexcept { return steps_; }
  const ControlTask& task() const noexcept { return task_; }
  const Pbn& pbn() const noexcept { return *pbn_; }
  std::size_t action_count() const noexcept { return action_count_; }

 private:
  const Pbn* pbn_;
  ControlTask task_;
  std::size_t action_count_;
  NetworkState state_;
  NetworkState scratch_;
  std::size_t steps_ = 0;
};

}  // namespace pbnrl
