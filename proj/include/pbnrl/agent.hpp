#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pbnrl/analysis.hpp"
#include "pbnrl/env.hpp"
#include "pbnrl/mlp.hpp"
#include "pbnrl/pbn.hpp"
#include "pbnrl/replay.hpp"
#include "pbnrl/rng.hpp"

namespace pbnrl {

using QParams = MlpParams<float>;

/// Writes the state bits (node 1 first) to out[0..N) as 0/1 reals.
template <class S>
void encode_state(const NetworkState& s, S* out) {
  for (std::size_t j = 0; j < s.size(); ++j) {
    out[j] = s.get(j) ? S(1) : S(0);
  }
}

template <class S = float>
Vector<S> encode_state(const NetworkState& s) {
  Vector<S> v(static_cast<Eigen::Index>(s.size()));
  encode_state(s, v.data());
  return v;
}

/// Index of the largest entry; ties go to the lowest index.
template <class Derived>
std::size_t argmax(const Eigen::DenseBase<Derived>& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(static_cast<Eigen::Index>(best))) {
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

/// Epsilon-greedy: uniform action with probability epsilon, otherwise the
/// greedy action. Always consumes one uniform draw, plus one more when
/// exploring.
std::size_t select_action(const QParams& params, const NetworkState& state, double epsilon,
                          std::size_t action_count, Rng& rng);

/// r for terminal samples, else r + gamma * Q_target(s', argmax_a Q_policy(s', a)).
template <class S>
std::vector<double> double_q_targets(const MlpParams<S>& policy, const MlpParams<S>& target,
                                     const std::vector<Experience>& batch, double gamma);

/// Pure argmax policy (state -> action index).
using Policy = std::function<std::size_t(const NetworkState&)>;

Policy greedy_policy(QParams params);

/// Maps a policy's action indices to the node flips of `task`.
Controller policy_controller(Policy policy, const ControlTask& task);

/// Value moving linearly from `start` to `end` over the first
/// `fraction * total` units, then held at `end`.
double linear_anneal(double start, double end, double fraction, double total, double t);

enum class TargetUpdateUnit { gradient_steps, episodes, env_steps };

struct EpisodicSchedule {
  std::size_t n_epochs = 1;
  std::size_t episodes_per_epoch = 1;
};

/// Counts environment steps; metrics are reported per `window` steps.
struct StepwiseSchedule {
  std::size_t total_steps = 0;
  std::size_t window = 1000;
};

struct TrainConfig {
  std::string name = "custom";
  double gamma = 0.99;
  double min_epsilon = 0.05;
  double exploration_fraction = 0.75;
  double omega = 0.6;
  double beta0 = 0.4;
  double beta_fraction = 0.75;
  double learning_rate = 1e-4;
  double priority_offset = 500.0;
  double huber_delta = 1.0;
  std::size_t batch_size = 128;
  std::size_t buffer_capacity = 10000;
  std::size_t target_update_interval = 400;
  TargetUpdateUnit target_update_unit = TargetUpdateUnit::episodes;
  std::vector<std::size_t> hidden{64, 64};
  std::optional<std::size_t> horizon;  // overrides the task horizon
  std::optional<double> success_reward;  // overrides the task's r
  std::variant<EpisodicSchedule, StepwiseSchedule> schedule = EpisodicSchedule{};
  std::uint64_t seed = 0;

  bool episodic() const noexcept { return std::holds_alternative<EpisodicSchedule>(schedule); }
  /// Episodes (episodic) or environment steps (stepwise) in the whole run.
  std::size_t total_units() const;
  std::vector<std::string> validate() const;
};

std::vector<std::string> preset_names();
/// Throws std::invalid_argument listing the known presets.
TrainConfig preset(const std::string& name);

const char* to_string(TargetUpdateUnit unit);
TargetUpdateUnit target_update_unit_from_string(const std::string& text);

/// One row per epoch (episodic) or window (stepwise).
///
/// Episodic rows average over the epoch's episodes (perturbations are
/// non-zero actions). Stepwise rows average per environment step.
struct MetricsRow {
  std::size_t index = 0;
  double avg_perturbations = 0.0;
  double avg_reward = 0.0;
  double epsilon = 0.0;
  double beta = 0.0;
  double loss = 0.0;
  double success_rate = 0.0;  // episodes ending on the target, attractor mode
  std::size_t episodes = 0;
  std::size_t env_steps = 0;
};

struct TrainArtifacts {
  QParams params;
  std::vector<MetricsRow> metrics;
  std::size_t episodes = 0;
  std::size_t env_steps = 0;
  std::size_t gradient_steps = 0;
  std::size_t target_updates = 0;
};

/// Non-finite loss or gradient during training. Carries the parameters
/// saved at the end of the last completed epoch or window.
class TrainingDiverged : public Diverged {
 public:
  TrainingDiverged(const std::string& what, QParams last_good, std::size_t gradient_step);
  const QParams& last_good() const noexcept { return last_good_; }
  std::size_t gradient_step() const noexcept { return gradient_step_; }

 private:
  QParams last_good_;
  std::size_t gradient_step_;
};

struct TrainHooks {
  std::function<void(const MetricsRow&)> on_metrics;
  /// Called after every target-network copy with the gradient step count.
  std::function<void(std::size_t gradient_steps, const QParams& target)> on_target_update;
  /// Called after every gradient step, once any target copy is done.
  std::function<void(std::size_t gradient_steps, const QParams& policy, const QParams& target)> on_gradient_step;
};

/// DDQN with proportional prioritized replay. Deterministic for a given
/// config (including seed).
TrainArtifacts train(const Pbn& pbn, const ControlTask& task, const TrainConfig& config,
                     const TrainHooks& hooks = {});

extern template std::vector<double> double_q_targets<float>(const MlpParams<float>&,
                                                            const MlpParams<float>&,
                                                            const std::vector<Experience>&, double);
extern template std::vector<double> double_q_targets<double>(const MlpParams<double>&,
                                                             const MlpParams<double>&,
                                                             const std::vector<Experience>&, double);

}  // namespace pbnrl
