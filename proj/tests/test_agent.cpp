#include <doctest.h>

#include <cmath>

#include "pbnrl/agent.hpp"
#include "pbnrl/fixtures.hpp"

using namespace pbnrl;

namespace {

/// One hidden unit fixed at 1, so Q(s, .) equals the output weights plus bias.
template <class S>
MlpParams<S> constant_q(const std::vector<S>& values, std::size_t inputs = 1) {
  MlpParams<S> p;
  p.spec = MlpSpec{inputs, {1}, values.size()};
  p.layers.resize(2);
  p.layers[0].weight = Matrix<S>::Zero(1, static_cast<Eigen::Index>(inputs));
  p.layers[0].bias = Vector<S>::Ones(1);
  p.layers[1].weight = Matrix<S>(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t a = 0; a < values.size(); ++a) p.layers[1].weight(static_cast<Eigen::Index>(a), 0) = values[a];
  p.layers[1].bias = Vector<S>::Zero(static_cast<Eigen::Index>(values.size()));
  return p;
}

Experience transition(double reward, bool terminal) {
  Experience e;
  e.state = NetworkState(1);
  e.next_state = NetworkState::from_string("1");
  e.reward = reward;
  e.terminal = terminal;
  return e;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.name = "tiny";
  c.batch_size = 16;
  c.buffer_capacity = 256;
  c.hidden = {16};
  c.target_update_interval = 7;
  c.target_update_unit = TargetUpdateUnit::gradient_steps;
  c.schedule = EpisodicSchedule{3, 20};
  c.seed = 42;
  return c;
}

}  // namespace

TEST_CASE("double-Q target evaluates the policy argmax with the target net") {
  const auto policy = constant_q<double>({1.0, 0.5, 3.0});
  const auto target = constant_q<double>({5.0, 4.0, 2.0});
  const std::vector<Experience> batch{transition(1.0, false), transition(-1.0, true)};
  const auto y = double_q_targets(policy, target, batch, 0.9);
  CHECK(y[0] == doctest::Approx(1.0 + 0.9 * 2.0).epsilon(1e-12));
  CHECK(y[0] != doctest::Approx(1.0 + 0.9 * 5.0));
  CHECK(y[1] == -1.0);
  const auto zero_gamma = double_q_targets(policy, target, batch, 0.0);
  CHECK(zero_gamma[0] == 1.0);
}

TEST_CASE("argmax breaks ties towards the lowest index") {
  Vector<float> v(5);
  v << 0.f, 2.f, 1.f, 1.f, 2.f;
  CHECK(argmax(v) == 1);
  const auto params = constant_q<float>({0.f, 1.f, 0.f, 0.f, 1.f});
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(select_action(params, NetworkState(1), 0.0, 5, rng) == 1);
  const auto unique = constant_q<float>({0.f, 1.f, 0.f, 7.f});
  CHECK(greedy_policy(unique)(NetworkState(1)) == 3);
}

TEST_CASE("epsilon one is uniform") {
  const auto params = constant_q<float>({0.f, 1.f, 0.f, 0.f});
  Rng rng(2);
  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[select_action(params, NetworkState(1), 1.0, 4, rng)];
  for (int c : counts) CHECK(std::abs(c / static_cast<double>(draws) - 0.25) < 4 * std::sqrt(0.25 * 0.75 / draws));
}

TEST_CASE("linear annealing endpoints") {
  CHECK(linear_anneal(1.0, 0.05, 0.75, 100, 0) == 1.0);
  CHECK(linear_anneal(1.0, 0.05, 0.75, 100, 37.5) == doctest::Approx(0.525));
  CHECK(linear_anneal(1.0, 0.05, 0.75, 100, 74.9) > 0.05);
  CHECK(linear_anneal(1.0, 0.05, 0.75, 100, 75) == 0.05);
  CHECK(linear_anneal(1.0, 0.05, 0.75, 100, 99) == 0.05);
  CHECK(linear_anneal(0.4, 1.0, 0.75, 100, 75) == 1.0);
  CHECK(linear_anneal(0.4, 1.0, 0.0, 100, 0) == 1.0);
}

TEST_CASE("training is reproducible for a seed") {
  const Pbn pbn(fixture_n10());
  const ControlTask task = task_n10(pbn);
  const TrainConfig config = tiny_config();
  const auto a = train(pbn, task, config);
  const auto b = train(pbn, task, config);
  REQUIRE(a.metrics.size() == 3);
  CHECK(a.params == b.params);
  CHECK(a.env_steps == b.env_steps);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.metrics[i].avg_reward == b.metrics[i].avg_reward);
    CHECK(a.metrics[i].loss == b.metrics[i].loss);
  }
  TrainConfig other = config;
  other.seed = 43;
  CHECK_FALSE(train(pbn, task, other).params == a.params);
}

TEST_CASE("zero-length training returns the initial parameters") {
  const Pbn pbn(fixture_n10());
  const ControlTask task = task_n10(pbn);
  TrainConfig config = tiny_config();
  config.schedule = EpisodicSchedule{0, 20};
  const auto out = train(pbn, task, config);
  CHECK(out.metrics.empty());
  CHECK(out.gradient_steps == 0);
  Rng init(config.seed, 1);
  CHECK(out.params == init_params<float>(MlpSpec{10, {16}, 11}, init));
}

TEST_CASE("target network changes only at update multiples and then equals the policy") {
  const Pbn pbn(fixture_n10());
  const ControlTask task = task_n10(pbn);
  const TrainConfig config = tiny_config();
  std::optional<QParams> previous;
  std::size_t copies = 0;
  bool stale_ok = true;
  bool fresh_ok = true;
  TrainHooks hooks;
  hooks.on_gradient_step = [&](std::size_t step, const QParams& policy, const QParams& target) {
    if (step % config.target_update_interval == 0) {
      fresh_ok = fresh_ok && target == policy;
      ++copies;
    } else if (previous) {
      stale_ok = stale_ok && target == *previous;
    }
    previous = target;
  };
  const auto out = train(pbn, task, config, hooks);
  CHECK(stale_ok);
  CHECK(fresh_ok);
  CHECK(copies == out.gradient_steps / config.target_update_interval);
  CHECK(out.target_updates == copies);
}

TEST_CASE("one gradient step per environment step once the buffer is warm") {
  const Pbn pbn(fixture_n10());
  const ControlTask task = task_n10(pbn);
  const auto out = train(pbn, task, tiny_config());
  CHECK(out.gradient_steps == out.env_steps - (tiny_config().batch_size - 1));
  CHECK(out.episodes == 60);
}

TEST_CASE("stepwise schedule counts environment steps") {
  const Pbn pbn(fixture_synthetic28());
  const ControlTask task = task_subset_pirin(28);
  TrainConfig config = tiny_config();
  config.schedule = StepwiseSchedule{2500, 1000};
  config.target_update_unit = TargetUpdateUnit::env_steps;
  config.target_update_interval = 500;
  const auto out = train(pbn, task, config);
  CHECK(out.env_steps == 2500);
  REQUIRE(out.metrics.size() == 3);
  CHECK(out.metrics[0].env_steps == 1000);
  CHECK(out.metrics[2].env_steps == 500);
  CHECK(out.target_updates == 5);
}

TEST_CASE("presets") {
  for (const auto& name : preset_names()) CHECK(preset(name).validate().empty());
  const TrainConfig n10 = preset("n10-attractor");
  CHECK(n10.total_units() == 300000);
  CHECK(n10.priority_offset == 500);
  CHECK(n10.buffer_capacity == 10000);
  CHECK(n10.batch_size == 128);
  CHECK(n10.target_update_interval == 400);
  CHECK(n10.horizon == 11);
  CHECK(preset("n20-attractor").total_units() == 670000);
  CHECK(preset("subset-pirin").total_units() == 150000);
  CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("policy controller maps actions to nodes") {
  ControlTask task = task_subset_pirin(28);
  const Controller c = policy_controller([](const NetworkState& s) -> std::size_t { return s.get(0) ? 1 : 0; }, task);
  NetworkState s(28);
  CHECK(c(s) == 0);
  s.set(0, true);
  CHECK(c(s) == 1);
}
