#include "pbnrl/env.hpp"

#include <algorithm>
#include <stdexcept>

namespace pbnrl {

bool ControlTask::is_desired(const NetworkState& s) const {
  if (const auto* a = std::get_if<AttractorTarget>(&target)) {
    return a->desired.contains(s);
  }
  return std::get<SubsetTarget>(target).satisfied_by(s);
}

std::vector<std::string> validate_task(const ControlTask& task, std::size_t n_nodes) {
  std::vector<std::string> out;
  if (task.controllable.empty()) {
    out.emplace_back("controllable node list is empty");
  }
  auto sorted = task.controllable;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    out.emplace_back("controllable node list has duplicates");
  }
  for (auto node : task.controllable) {
    if (node < 1 || node > n_nodes) {
      out.push_back("controllable node " + std::to_string(node) + " out of range [1, " +
                    std::to_string(n_nodes) + "]");
    }
  }
  if (task.horizon < 1) {
    out.emplace_back("horizon must be at least 1");
  }
  if (const auto* a = std::get_if<AttractorTarget>(&task.target)) {
    if (a->desired.empty()) {
      out.emplace_back("desired state set is empty");
    }
    for (const auto& s : a->desired) {
      if (s.size() != n_nodes) {
        out.push_back("desired state " + s.to_string() + " does not have " + std::to_string(n_nodes) +
                      " nodes");
        break;
      }
    }
    for (std::size_t k = 0; k < a->undesired.size(); ++k) {
      for (const auto& s : a->undesired[k]) {
        if (a->desired.contains(s)) {
          out.push_back("undesired set " + std::to_string(k + 1) + " overlaps the desired set at " +
                        s.to_string());
          break;
        }
      }
    }
    if (!(task.rewards.success_reward > 2.0)) {
      out.emplace_back("attractor-mode success reward must exceed 2");
    }
  } else {
    const auto& subset = std::get<SubsetTarget>(task.target);
    if (subset.node < 1 || subset.node > n_nodes) {
      out.push_back("target node " + std::to_string(subset.node) + " out of range");
    }
  }
  return out;
}

std::size_t action_space_size(const ControlTask& task) {
  if (task.controllable.empty()) {
    throw std::invalid_argument("action_space_size: no controllable nodes");
  }
  return task.controllable.size() + 1;
}

std::size_t action_node(const ControlTask& task, std::size_t action) {
  if (action > task.controllable.size()) {
    throw std::out_of_range("action " + std::to_string(action) + " outside action space of size " +
                            std::to_string(task.controllable.size() + 1));
  }
  return action == 0 ? 0 : task.controllable[action - 1];
}

double transition_reward(const ControlTask& task, std::size_t action, const NetworkState& next) {
  const RewardParams& r = task.rewards;
  double reward = 0.0;
  if (const auto* a = std::get_if<AttractorTarget>(&task.target)) {
    if (a->desired.contains(next)) {
      reward = r.success_reward;
    } else if (std::any_of(a->undesired.begin(), a->undesired.end(),
                           [&](const StateSet& set) { return set.contains(next); })) {
      reward = r.undesirable_attractor_penalty;
    } else {
      reward = r.step_penalty;
    }
  } else {
    reward = std::get<SubsetTarget>(task.target).satisfied_by(next) ? r.subset_good : r.subset_bad;
  }
  if (action != 0) {
    reward -= r.action_cost;
  }
  return reward;
}

const char* to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::reached_target:
      return "reached-target";
    case TerminalReason::horizon_exhausted:
      return "horizon-exhausted";
    case TerminalReason::none:
      break;
  }
  return "none";
}

ControlEnv::ControlEnv(const Pbn& pbn, ControlTask task)
    : pbn_(&pbn), task_(std::move(task)), action_count_(action_space_size(task_)) {
  if (auto problems = validate_task(task_, pbn.size()); !problems.empty()) {
    throw std::invalid_argument("invalid control task: " + problems.front());
  }
  state_ = NetworkState(pbn.size());
  scratch_ = NetworkState(pbn.size());
}

const NetworkState& ControlEnv::reset(Rng& rng) {
  state_ = NetworkState::random(pbn_->size(), rng);
  steps_ = 0;
  return state_;
}

const NetworkState& ControlEnv::reset(NetworkState initial) {
  if (initial.size() != pbn_->size()) {
    throw std::invalid_argument("ControlEnv::reset: initial state has the wrong size");
  }
  state_ = std::move(initial);
  steps_ = 0;
  return state_;
}

StepOutcome ControlEnv::step(std::size_t action, Rng& rng) {
  const std::size_t node = action_node(task_, action);
  if (node != 0) {
    state_.flip(node - 1);
  }
  pbn_->step_into(state_, scratch_, rng);
  std::swap(state_, scratch_);
  ++steps_;

  StepOutcome out;
  out.next_state = state_;
  out.reward = transition_reward(task_, action, state_);
  if (task_.attractor_mode() && task_.is_desired(state_)) {
    out.terminal = true;
    out.reason = TerminalReason::reached_target;
  } else if (steps_ >= task_.horizon) {
    out.terminal = true;
    out.reason = TerminalReason::horizon_exhausted;
  }
  return out;
}

}  // namespace pbnrl
