#include "pbnrl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbnrl {

std::size_t select_action(const QParams& params, const NetworkState& state, double epsilon,
                          std::size_t action_count, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("select_action: epsilon must lie in [0, 1]");
  }
  if (rng.uniform() < epsilon) {
    return static_cast<std::size_t>(rng.below(action_count));
  }
  return argmax(forward(params, encode_state<float>(state)));
}

namespace {

template <class S>
void fill_inputs(const std::vector<const Experience*>& batch, bool next, Matrix<S>& out) {
  const std::size_t n = batch.front()->state.size();
  out.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    encode_state(next ? batch[b]->next_state : batch[b]->state, out.col(static_cast<Eigen::Index>(b)).data());
  }
}

/// Double-Q bootstrap values given the two next-state output matrices.
template <class S>
void targets_from_outputs(const std::vector<const Experience*>& batch, const Matrix<S>& next_policy,
                          const Matrix<S>& next_target, double gamma, std::vector<double>& out) {
  out.resize(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    double y = batch[b]->reward;
    if (!batch[b]->terminal) {
      const auto best = static_cast<Eigen::Index>(argmax(next_policy.col(col)));
      y += gamma * static_cast<double>(next_target(best, col));
    }
    out[b] = y;
  }
}

}  // namespace

template <class S>
std::vector<double> double_q_targets(const MlpParams<S>& policy, const MlpParams<S>& target,
                                     const std::vector<Experience>& batch, double gamma) {
  std::vector<double> out;
  if (batch.empty()) {
    return out;
  }
  std::vector<const Experience*> ptrs;
  for (const auto& e : batch) {
    ptrs.push_back(&e);
  }
  Matrix<S> inputs;
  fill_inputs(ptrs, true, inputs);
  ForwardCache<S> policy_cache;
  ForwardCache<S> target_cache;
  forward_batch(policy, inputs, policy_cache);
  forward_batch(target, inputs, target_cache);
  targets_from_outputs(ptrs, policy_cache.activations.back(), target_cache.activations.back(), gamma, out);
  return out;
}

template std::vector<double> double_q_targets<float>(const MlpParams<float>&, const MlpParams<float>&,
                                                     const std::vector<Experience>&, double);
template std::vector<double> double_q_targets<double>(const MlpParams<double>&, const MlpParams<double>&,
                                                      const std::vector<Experience>&, double);

Policy greedy_policy(QParams params) {
  return [params = std::move(params)](const NetworkState& s) {
    return argmax(forward(params, encode_state<float>(s)));
  };
}

Controller policy_controller(Policy policy, const ControlTask& task) {
  return [policy = std::move(policy), controllable = task.controllable](const NetworkState& s) -> std::size_t {
    const std::size_t action = policy(s);
    return action == 0 ? 0 : controllable.at(action - 1);
  };
}

double linear_anneal(double start, double end, double fraction, double total, double t) {
  const double span = fraction * total;
  if (!(span > 0.0) || t >= span) {
    return end;
  }
  return start + (end - start) * (t / span);
}

std::size_t TrainConfig::total_units() const {
  if (const auto* e = std::get_if<EpisodicSchedule>(&schedule)) {
    return e->n_epochs * e->episodes_per_epoch;
  }
  return std::get<StepwiseSchedule>(schedule).total_steps;
}

std::vector<std::string> TrainConfig::validate() const {
  std::vector<std::string> out;
  if (!(gamma > 0.0 && gamma <= 1.0)) out.emplace_back("gamma must lie in (0, 1]");
  if (!(min_epsilon >= 0.0 && min_epsilon <= 1.0)) out.emplace_back("min_epsilon must lie in [0, 1]");
  if (!(exploration_fraction >= 0.0 && exploration_fraction <= 1.0)) {
    out.emplace_back("exploration_fraction must lie in [0, 1]");
  }
  if (!(omega >= 0.0)) out.emplace_back("omega must be non-negative");
  if (!(beta0 >= 0.0 && beta0 <= 1.0)) out.emplace_back("beta0 must lie in [0, 1]");
  if (!(beta_fraction >= 0.0 && beta_fraction <= 1.0)) out.emplace_back("beta_fraction must lie in [0, 1]");
  if (!(learning_rate > 0.0)) out.emplace_back("learning_rate must be positive");
  if (!(priority_offset > 0.0)) out.emplace_back("priority offset c must be positive");
  if (!(huber_delta > 0.0)) out.emplace_back("huber_delta must be positive");
  if (batch_size < 1) out.emplace_back("batch_size must be at least 1");
  if (buffer_capacity < 1) out.emplace_back("buffer_capacity must be at least 1");
  if (batch_size > buffer_capacity) out.emplace_back("batch_size exceeds buffer_capacity");
  if (target_update_interval < 1) out.emplace_back("target_update_interval must be at least 1");
  for (auto w : hidden) {
    if (w < 1) out.emplace_back("hidden layer widths must be at least 1");
  }
  if (horizon && *horizon < 1) out.emplace_back("horizon must be at least 1");
  if (success_reward && !(*success_reward > 2.0)) out.emplace_back("success_reward must exceed 2");
  if (const auto* s = std::get_if<StepwiseSchedule>(&schedule); s && s->window < 1) {
    out.emplace_back("metrics window must be at least 1");
  }
  return out;
}

const char* to_string(TargetUpdateUnit unit) {
  switch (unit) {
    case TargetUpdateUnit::gradient_steps:
      return "gradient_steps";
    case TargetUpdateUnit::episodes:
      return "episodes";
    case TargetUpdateUnit::env_steps:
      return "env_steps";
  }
  return "gradient_steps";
}

TargetUpdateUnit target_update_unit_from_string(const std::string& text) {
  if (text == "gradient_steps") return TargetUpdateUnit::gradient_steps;
  if (text == "episodes") return TargetUpdateUnit::episodes;
  if (text == "env_steps") return TargetUpdateUnit::env_steps;
  throw std::invalid_argument("unknown target update unit '" + text +
                              "' (expected gradient_steps, episodes or env_steps)");
}

std::vector<std::string> preset_names() {
  return {"n10-attractor", "n20-attractor", "n7-attractor", "subset-pirin", "subset-n70", "subset-n200"};
}

TrainConfig preset(const std::string& name) {
  TrainConfig c;
  c.name = name;
  if (name == "n10-attractor") {
    c.schedule = EpisodicSchedule{60, 5000};
    c.horizon = 11;
    c.success_reward = 5.0;
    c.priority_offset = 500.0;
    c.buffer_capacity = 10000;
    c.batch_size = 128;
    c.target_update_interval = 400;
    c.target_update_unit = TargetUpdateUnit::episodes;
  } else if (name == "n20-attractor") {
    c.schedule = EpisodicSchedule{134, 5000};
    c.horizon = 100;
    c.success_reward = 20.0;
    c.priority_offset = 5000.0;
    c.buffer_capacity = 500000;
    c.batch_size = 128;
    c.target_update_interval = 5000;
    c.target_update_unit = TargetUpdateUnit::episodes;
  } else if (name == "n7-attractor") {
    c.schedule = EpisodicSchedule{30, 5000};
    c.gamma = 0.9;
    c.horizon = 7;
    c.success_reward = 5.0;
    c.priority_offset = 500.0;
    c.buffer_capacity = 10000;
    c.batch_size = 128;
    c.target_update_interval = 400;
    c.target_update_unit = TargetUpdateUnit::episodes;
  } else if (name == "subset-pirin" || name == "subset-n70" || name == "subset-n200") {
    c.schedule = StepwiseSchedule{150000, 1000};
    c.horizon = 100;
    c.priority_offset = 1e-6;
    c.exploration_fraction = 0.1;
    c.buffer_capacity = 1000000;
    c.batch_size = 256;
    c.target_update_interval = 10000;
    c.target_update_unit = TargetUpdateUnit::env_steps;
    if (name == "subset-n70") {
      c.buffer_capacity = 5120;
      c.batch_size = 128;
      c.target_update_interval = 1000;
      c.exploration_fraction = 0.5;
      c.hidden = {128, 64};
    } else if (name == "subset-n200") {
      c.hidden = {256, 128, 64};
      c.exploration_fraction = 0.5;
    }
  } else {
    std::string known;
    for (const auto& n : preset_names()) {
      known += (known.empty() ? "" : ", ") + n;
    }
    throw std::invalid_argument("unknown preset '" + name + "'; known presets: " + known);
  }
  return c;
}

TrainingDiverged::TrainingDiverged(const std::string& what, QParams last_good, std::size_t gradient_step)
    : Diverged(what), last_good_(std::move(last_good)), gradient_step_(gradient_step) {}

namespace {

class Trainer {
 public:
  Trainer(const Pbn& pbn, const ControlTask& task, const TrainConfig& config, const TrainHooks& hooks)
      : config_(config),
        hooks_(hooks),
        task_(adjusted_task(task, config)),
        env_(pbn, task_),
        buffer_(config.buffer_capacity, config.omega),
        env_rng_(config.seed, 2),
        explore_rng_(config.seed, 3),
        replay_rng_(config.seed, 4) {
    MlpSpec spec;
    spec.input_size = pbn.size();
    spec.hidden = config.hidden;
    spec.output_size = env_.action_count();
    Rng init_rng(config.seed, 1);
    policy_ = init_params<float>(spec, init_rng);
    target_ = policy_;
    last_good_ = policy_;
    grads_ = policy_.zeros_like();
    adam_ = make_adam(policy_, config.learning_rate);
    ptrs_.resize(config.batch_size);
    output_grad_.resize(static_cast<Eigen::Index>(spec.output_size),
                        static_cast<Eigen::Index>(config.batch_size));
  }

  TrainArtifacts run() {
    if (config_.episodic()) {
      run_episodic(std::get<EpisodicSchedule>(config_.schedule));
    } else {
      run_stepwise(std::get<StepwiseSchedule>(config_.schedule));
    }
    TrainArtifacts out;
    out.params = policy_;
    out.metrics = std::move(metrics_);
    out.episodes = episodes_;
    out.env_steps = env_steps_;
    out.gradient_steps = gradient_steps_;
    out.target_updates = target_updates_;
    return out;
  }

 private:
  struct Accumulator {
    double perturbations = 0.0;
    double reward = 0.0;
    double loss = 0.0;
    std::size_t losses = 0;
    std::size_t episodes = 0;
    std::size_t successes = 0;
    std::size_t steps = 0;
  };

  static ControlTask adjusted_task(ControlTask task, const TrainConfig& config) {
    if (auto problems = config.validate(); !problems.empty()) {
      throw std::invalid_argument("invalid training config: " + problems.front());
    }
    if (config.horizon) {
      task.horizon = *config.horizon;
    }
    if (config.success_reward) {
      task.rewards.success_reward = *config.success_reward;
    }
    return task;
  }

  void run_episodic(const EpisodicSchedule& schedule) {
    const double total = static_cast<double>(schedule.n_epochs * schedule.episodes_per_epoch);
    for (std::size_t epoch = 0; epoch < schedule.n_epochs; ++epoch) {
      Accumulator acc;
      for (std::size_t e = 0; e < schedule.episodes_per_epoch; ++e) {
        const auto t = static_cast<double>(episodes_);
        epsilon_ = linear_anneal(1.0, config_.min_epsilon, config_.exploration_fraction, total, t);
        beta_ = linear_anneal(config_.beta0, 1.0, config_.beta_fraction, total, t);
        run_episode(acc, nullptr);
        ++episodes_;
        if (config_.target_update_unit == TargetUpdateUnit::episodes &&
            episodes_ % config_.target_update_interval == 0) {
          update_target();
        }
      }
      emit(epoch, acc, static_cast<double>(acc.episodes));
    }
  }

  void run_stepwise(const StepwiseSchedule& schedule) {
    Accumulator acc;
    while (env_steps_ < schedule.total_steps) {
      run_episode(acc, &schedule);
      ++episodes_;
      if (config_.target_update_unit == TargetUpdateUnit::episodes &&
          episodes_ % config_.target_update_interval == 0) {
        update_target();
      }
    }
    if (acc.steps > 0) {
      emit(window_index_++, acc, static_cast<double>(acc.steps));
    }
  }

  void run_episode(Accumulator& acc, const StepwiseSchedule* stepwise) {
    env_.reset(env_rng_);
    double episode_reward = 0.0;
    std::size_t flips = 0;
    bool success = false;
    while (true) {
      if (stepwise != nullptr) {
        if (env_steps_ >= stepwise->total_steps) {
          break;
        }
        const auto total = static_cast<double>(stepwise->total_steps);
        const auto t = static_cast<double>(env_steps_);
        epsilon_ = linear_anneal(1.0, config_.min_epsilon, config_.exploration_fraction, total, t);
        beta_ = linear_anneal(config_.beta0, 1.0, config_.beta_fraction, total, t);
      }
      NetworkState state = env_.state();
      const std::size_t action = select_action(policy_, state, epsilon_, env_.action_count(), explore_rng_);
      StepOutcome out = env_.step(action, env_rng_);
      ++env_steps_;
      flips += action != 0 ? 1U : 0U;
      episode_reward += out.reward;
      acc.steps += 1;
      if (stepwise != nullptr) {
        acc.perturbations += action != 0 ? 1.0 : 0.0;
        acc.reward += out.reward;
      }
      const bool reached = out.reason == TerminalReason::reached_target;
      success = success || reached;
      buffer_.add(Experience{std::move(state), static_cast<std::uint32_t>(action), out.reward,
                             std::move(out.next_state), reached});
      if (buffer_.size() >= config_.batch_size) {
        const double loss = learn();
        acc.loss += loss;
        acc.losses += 1;
      }
      if (config_.target_update_unit == TargetUpdateUnit::env_steps &&
          env_steps_ % config_.target_update_interval == 0) {
        update_target();
      }
      if (stepwise != nullptr && acc.steps >= stepwise->window) {
        emit(window_index_++, acc, static_cast<double>(acc.steps));
        acc = Accumulator{};
      }
      if (out.terminal) {
        break;
      }
    }
    if (stepwise == nullptr) {
      acc.perturbations += static_cast<double>(flips);
      acc.reward += episode_reward;
    }
    acc.episodes += 1;
    acc.successes += success ? 1U : 0U;
  }

  double learn() {
    const auto batch = buffer_.sample(config_.batch_size, beta_, replay_rng_);
    for (std::size_t b = 0; b < ptrs_.size(); ++b) {
      ptrs_[b] = &buffer_.at(batch.indices[b]);
    }
    fill_inputs(ptrs_, true, next_inputs_);
    fill_inputs(ptrs_, false, inputs_);
    forward_batch(policy_, next_inputs_, next_policy_cache_);
    forward_batch(target_, next_inputs_, next_target_cache_);
    targets_from_outputs(ptrs_, next_policy_cache_.activations.back(), next_target_cache_.activations.back(),
                         config_.gamma, targets_);
    const Matrix<float>& q = forward_batch(policy_, inputs_, cache_);

    output_grad_.setZero();
    td_errors_.resize(ptrs_.size());
    const double scale = 1.0 / static_cast<double>(ptrs_.size());
    double loss = 0.0;
    for (std::size_t b = 0; b < ptrs_.size(); ++b) {
      const auto col = static_cast<Eigen::Index>(b);
      const auto a = static_cast<Eigen::Index>(ptrs_[b]->action);
      const double pred = static_cast<double>(q(a, col));
      const HuberLoss h = huber_loss(pred, targets_[b], config_.huber_delta);
      td_errors_[b] = targets_[b] - pred;
      loss += batch.weights[b] * h.loss * scale;
      output_grad_(a, col) = static_cast<float>(batch.weights[b] * h.grad * scale);
    }
    if (!std::isfinite(loss)) {
      throw TrainingDiverged("training diverged: non-finite loss at gradient step " +
                                 std::to_string(gradient_steps_),
                             last_good_, gradient_steps_);
    }
    backward(policy_, cache_, output_grad_, grads_);
    try {
      adam_step(policy_, grads_, adam_);
    } catch (const Diverged& e) {
      throw TrainingDiverged(e.what(), last_good_, gradient_steps_);
    }
    buffer_.update_priorities(batch.indices, td_errors_, config_.priority_offset);
    ++gradient_steps_;
    if (config_.target_update_unit == TargetUpdateUnit::gradient_steps &&
        gradient_steps_ % config_.target_update_interval == 0) {
      update_target();
    }
    if (hooks_.on_gradient_step) {
      hooks_.on_gradient_step(gradient_steps_, policy_, target_);
    }
    return loss;
  }

  void update_target() {
    target_ = policy_;
    ++target_updates_;
    if (hooks_.on_target_update) {
      hooks_.on_target_update(gradient_steps_, target_);
    }
  }

  void emit(std::size_t index, const Accumulator& acc, double denominator) {
    MetricsRow row;
    row.index = index;
    row.avg_perturbations = denominator > 0 ? acc.perturbations / denominator : 0.0;
    row.avg_reward = denominator > 0 ? acc.reward / denominator : 0.0;
    row.epsilon = epsilon_;
    row.beta = beta_;
    row.loss = acc.losses > 0 ? acc.loss / static_cast<double>(acc.losses) : 0.0;
    row.success_rate =
        acc.episodes > 0 ? static_cast<double>(acc.successes) / static_cast<double>(acc.episodes) : 0.0;
    row.episodes = acc.episodes;
    row.env_steps = acc.steps;
    metrics_.push_back(row);
    last_good_ = policy_;
    if (hooks_.on_metrics) {
      hooks_.on_metrics(row);
    }
  }

  const TrainConfig& config_;
  const TrainHooks& hooks_;
  ControlTask task_;
  ControlEnv env_;
  ReplayBuffer buffer_;
  Rng env_rng_;
  Rng explore_rng_;
  Rng replay_rng_;
  QParams policy_;
  QParams target_;
  QParams last_good_;
  QParams grads_;
  AdamState<float> adam_;

  std::vector<const Experience*> ptrs_;
  Matrix<float> inputs_;
  Matrix<float> next_inputs_;
  Matrix<float> output_grad_;
  ForwardCache<float> cache_;
  ForwardCache<float> next_policy_cache_;
  ForwardCache<float> next_target_cache_;
  std::vector<double> targets_;
  std::vector<double> td_errors_;

  std::vector<MetricsRow> metrics_;
  double epsilon_ = 1.0;
  double beta_ = 0.4;
  std::size_t episodes_ = 0;
  std::size_t env_steps_ = 0;
  std::size_t gradient_steps_ = 0;
  std::size_t target_updates_ = 0;
  std::size_t window_index_ = 0;
};

}  // namespace

TrainArtifacts train(const Pbn& pbn, const ControlTask& task, const TrainConfig& config,
                     const TrainHooks& hooks) {
  Trainer trainer(pbn, task, config, hooks);
  return trainer.run();
}

}  // namespace pbnrl
