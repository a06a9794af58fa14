#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pbnrl/agent.hpp"
#include "pbnrl/analysis.hpp"
#include "pbnrl/eval.hpp"
#include "pbnrl/fixtures.hpp"
#include "pbnrl/inference.hpp"
#include "pbnrl/io.hpp"
#include "pbnrl/pbn.hpp"

namespace fs = std::filesystem;
using namespace pbnrl;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kOk = 0;
constexpr int kThresholdFail = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Collects written artifacts; the manifest is committed last.
class Run {
 public:
  Run(std::string command, std::vector<std::string> args, fs::path out, std::uint64_t seed)
      : command_(std::move(command)),
        args_(std::move(args)),
        out_(std::move(out)),
        seed_(seed),
        start_(std::chrono::steady_clock::now()) {}

  fs::path path(const std::string& name) const { return out_ / name; }

  void write(const std::string& name, const std::string& text) {
    write_text_file(path(name), text);
    outputs_.push_back({name, text.size()});
  }

  void input(const std::string& role, const std::string& value) { inputs_[role] = value; }

  void finish() {
    Json outputs = Json::array();
    for (const auto& [name, bytes] : outputs_) {
      outputs.push_back({{"path", name}, {"bytes", bytes}});
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json manifest{{"format", kManifestFormat},
                  {"version", kManifestVersion},
                  {"command", command_},
                  {"arguments", args_},
                  {"seed", seed_},
                  {"inputs", inputs_},
                  {"versions",
                   {{"pbnrl", kVersion},
                    {"compiler", __VERSION__},
                    {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)}}},
                  {"outputs", outputs},
                  {"wall_clock_seconds", seconds}};
    write_text_file(path("manifest.json"), dump_json(manifest));
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  fs::path out_;
  std::uint64_t seed_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::size_t>> outputs_;
  Json inputs_ = Json::object();
};

std::string default_out_dir() {
  const char* env = std::getenv("PBNRL_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "pbnrl-out";
}

/// "fixture:NAME" or a network JSON path.
PbnModel resolve_model(const std::string& arg) {
  if (arg.rfind("fixture:", 0) == 0) {
    try {
      return fixture_model(arg.substr(8));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return load_model(arg);
}

Pbn build_pbn(const std::string& arg) {
  try {
    return Pbn(resolve_model(arg));
  } catch (const InvalidModel& e) {
    std::string msg = "invalid network '" + arg + "':";
    for (const auto& v : e.violations()) {
      msg += "\n  node " + std::to_string(v.node) + " [" + v.rule + "]: " + v.message;
    }
    throw InputError(msg);
  }
}

ControlTask resolve_task(const std::string& arg, const Pbn& pbn) {
  ControlTask task;
  if (arg.rfind("fixture:", 0) == 0) {
    try {
      task = fixture_task(arg.substr(8), pbn);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else {
    task = load_task(arg, pbn);
  }
  if (auto problems = validate_task(task, pbn.size()); !problems.empty()) {
    throw InputError("invalid task '" + arg + "': " + problems.front());
  }
  return task;
}

std::size_t default_threads() { return std::max(1U, std::thread::hardware_concurrency()); }

struct Shared {
  std::uint64_t seed = 0;
  std::size_t threads = default_threads();
  std::string out = default_out_dir();
};

void add_shared(CLI::App* cmd, Shared& shared, bool with_out = true) {
  cmd->add_option("--seed", shared.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", shared.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  if (with_out) {
    cmd->add_option("--out", shared.out, "Output directory (default $PBNRL_OUT_DIR or ./pbnrl-out)");
  }
}

int cmd_validate(const std::string& network) {
  const PbnModel model = resolve_model(network);
  const auto violations = validate_model(model);
  if (violations.empty()) {
    std::cout << "ok: " << model.n_nodes << " nodes, " << realization_count(model) << " realizations\n";
    return kOk;
  }
  for (const auto& v : violations) {
    std::cout << "node " << v.node << " [" << v.rule << "]: " << v.message << "\n";
  }
  return kThresholdFail;
}

int cmd_attractors(Run& run, const Shared& shared, const std::string& network, std::size_t occupancy_runs,
                   std::size_t max_steps, std::size_t max_nodes) {
  run.input("network", network);
  const Pbn pbn = build_pbn(network);
  const AttractorSet set = find_attractors(pbn, max_nodes);
  std::optional<OccupancyEstimate> occupancy;
  if (occupancy_runs > 0) {
    occupancy = estimate_attractor_occupancy(pbn, set, occupancy_runs, max_steps, shared.seed, shared.threads);
  }
  const std::string text = dump_json(attractors_to_json(set, occupancy ? &*occupancy : nullptr));
  run.write("attractors.json", text);
  run.finish();
  std::cout << text;
  return kOk;
}

int cmd_ssd(Run& run, const Shared& shared, const std::string& network, bool exact, std::size_t runs,
            std::size_t steps, std::size_t burn_in, const std::string& policy_path, const std::string& task_arg,
            std::size_t max_nodes) {
  run.input("network", network);
  const Pbn pbn = build_pbn(network);
  Json summary{{"n_nodes", pbn.size()}};
  std::vector<double> dense;
  if (exact) {
    if (!policy_path.empty()) {
      throw UsageError("--exact does not take a policy");
    }
    const TransitionMatrix m = build_transition_matrix(pbn, max_nodes);
    dense = exact_ssd(m);
    summary["method"] = "exact";
    run.write("ssd.csv", dense_distribution_csv(pbn.size(), dense));
  } else {
    MonteCarloOptions mc;
    mc.runs = runs;
    mc.steps_per_run = steps;
    mc.burn_in = burn_in;
    mc.seed = shared.seed;
    mc.threads = shared.threads;
    Controller controller;
    StatePredicate predicate;
    std::optional<ControlTask> task;
    if (!task_arg.empty()) {
      run.input("task", task_arg);
      task = resolve_task(task_arg, pbn);
      predicate = [&task](const NetworkState& s) { return task->is_desired(s); };
    }
    if (!policy_path.empty()) {
      if (!task) {
        throw UsageError("--policy needs --task to map actions to nodes");
      }
      run.input("policy", policy_path);
      controller = policy_controller(greedy_policy(load_checkpoint(policy_path)), *task);
    }
    const StateHistogram hist = monte_carlo_ssd(pbn, mc, controller, predicate);
    summary["method"] = "monte-carlo";
    summary["runs"] = runs;
    summary["steps_per_run"] = steps;
    summary["burn_in"] = burn_in;
    summary["samples"] = hist.samples;
    summary["distinct_states"] = hist.distribution.size();
    if (task) {
      summary["desired_mass"] = hist.predicate_mass;
      summary["desired_mass_standard_error"] = hist.predicate_mass_se;
    }
    run.write("ssd.csv", histogram_csv(hist));
    if (pbn.size() <= 16) {
      dense = hist.dense();
    }
  }
  if (!dense.empty() && pbn.size() <= 16) {
    run.write("ssd.svg", render_histogram("steady-state distribution", dense));
  }
  const std::string text = dump_json(summary);
  run.write("ssd.json", text);
  run.finish();
  std::cout << text;
  return kOk;
}

int cmd_train(Run& run, const Shared& shared, const std::string& network, const std::string& task_arg,
              const std::string& config_path, const std::string& preset_name, std::optional<std::size_t> epochs,
              std::optional<std::size_t> episodes_per_epoch, std::optional<std::size_t> total_steps, bool quiet) {
  run.input("network", network);
  run.input("task", task_arg);
  if (config_path.empty() == preset_name.empty()) {
    throw UsageError("give exactly one of --config or --preset");
  }
  TrainConfig config;
  if (!preset_name.empty()) {
    try {
      config = preset(preset_name);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    run.input("preset", preset_name);
  } else {
    config = config_from_json(read_json_file(config_path));
    run.input("config", config_path);
  }
  config.seed = shared.seed;
  if (auto* e = std::get_if<EpisodicSchedule>(&config.schedule)) {
    if (epochs) e->n_epochs = *epochs;
    if (episodes_per_epoch) e->episodes_per_epoch = *episodes_per_epoch;
    if (total_steps) throw UsageError("--total-steps applies to step-based schedules only");
  } else {
    auto& s = std::get<StepwiseSchedule>(config.schedule);
    if (total_steps) s.total_steps = *total_steps;
    if (epochs || episodes_per_epoch) throw UsageError("--epochs applies to episode-based schedules only");
  }
  if (auto problems = config.validate(); !problems.empty()) {
    throw InputError("invalid training config: " + problems.front());
  }
  const Pbn pbn = build_pbn(network);
  const ControlTask task = resolve_task(task_arg, pbn);
  TrainHooks hooks;
  if (!quiet) {
    hooks.on_metrics = [&config](const MetricsRow& row) {
      std::cerr << (config.episodic() ? "epoch " : "window ") << row.index << ": avg perturbations "
                << format_real(row.avg_perturbations) << ", avg reward " << format_real(row.avg_reward)
                << ", epsilon " << format_real(row.epsilon) << ", loss " << format_real(row.loss) << "\n";
    };
  }
  run.write("config.json", dump_json(config_to_json(config)));
  TrainArtifacts artifacts;
  try {
    artifacts = train(pbn, task, config, hooks);
  } catch (const TrainingDiverged& e) {
    run.write("checkpoint_last_good.json", dump_json(params_to_json(e.last_good())));
    run.finish();
    std::cerr << "error: " << e.what() << "\n";
    return kThresholdFail;
  }
  run.write("checkpoint.json", dump_json(params_to_json(artifacts.params)));
  const std::string label = config.episodic() ? "epoch" : "window";
  run.write("metrics.csv", metrics_csv(artifacts.metrics, label));
  if (!artifacts.metrics.empty()) {
    std::vector<double> x;
    std::vector<double> perturbations;
    std::vector<double> reward;
    for (const auto& row : artifacts.metrics) {
      x.push_back(static_cast<double>(row.index));
      perturbations.push_back(row.avg_perturbations);
      reward.push_back(row.avg_reward);
    }
    run.write("avg_perturbations.svg",
              render_line_chart(config.name + ": average perturbations", label, "avg perturbations", x, perturbations));
    run.write("avg_reward.svg", render_line_chart(config.name + ": average reward", label, "avg reward", x, reward));
  }
  Json summary{{"preset", config.name},
               {"episodes", artifacts.episodes},
               {"env_steps", artifacts.env_steps},
               {"gradient_steps", artifacts.gradient_steps},
               {"target_updates", artifacts.target_updates},
               {"parameters", artifacts.params.parameter_count()}};
  run.write("train_summary.json", dump_json(summary));
  run.finish();
  std::cout << dump_json(summary);
  return kOk;
}

int cmd_eval(Run& run, const Shared& shared, const std::string& network, const std::string& task_arg,
             const std::string& checkpoint, const std::string& mode, std::size_t attempts,
             std::optional<std::size_t> horizon, std::size_t sample_states, std::size_t enumerate_up_to,
             std::size_t runs, std::size_t steps,
             double threshold, double min_shift, std::size_t max_steps) {
  run.input("network", network);
  run.input("task", task_arg);
  const Pbn pbn = build_pbn(network);
  const ControlTask task = resolve_task(task_arg, pbn);
  SweepOptions sweep;
  sweep.attempts_per_state = attempts;
  sweep.horizon = horizon;
  sweep.sample_states = sample_states;
  sweep.max_enumerated_nodes = enumerate_up_to;
  sweep.seed = shared.seed;
  sweep.threads = shared.threads;

  if (mode == "random") {
    if (!task.attractor_mode()) {
      throw UsageError("--mode random needs an attractor-target task");
    }
    const auto report = random_perturbation_baseline(pbn, task, sweep, max_steps);
    const std::string text = dump_json(random_baseline_to_json(report));
    run.write("random_baseline.json", text);
    run.finish();
    std::cout << text;
    return kOk;
  }
  if (checkpoint.empty()) {
    throw UsageError("--checkpoint is required for --mode " + mode);
  }
  run.input("checkpoint", checkpoint);
  const QParams params = load_checkpoint(checkpoint);
  if (params.spec.input_size != pbn.size() || params.spec.output_size != action_space_size(task)) {
    throw InputError("checkpoint shape does not match the network and task");
  }
  const Policy policy = greedy_policy(params);

  if (mode == "success") {
    if (!task.attractor_mode()) {
      throw UsageError("--mode success needs an attractor-target task");
    }
    const SuccessReport report = success_sweep(pbn, task, policy, sweep);
    Json j = success_report_to_json(report);
    j["threshold"] = threshold;
    j["passed"] = report.success_rate >= threshold;
    run.write("per_state.csv", per_state_success_csv(report));
    const std::string text = dump_json(j);
    run.write("success_report.json", text);
    run.finish();
    std::cout << text;
    return report.success_rate >= threshold ? kOk : kThresholdFail;
  }
  if (mode == "ssd") {
    if (task.attractor_mode()) {
      throw UsageError("--mode ssd needs a subset-target task");
    }
    const SsdShiftReport report = ssd_shift(pbn, task, policy, runs, steps, shared.seed, shared.threads);
    Json j = ssd_shift_to_json(report);
    j["min_shift"] = min_shift;
    j["passed"] = report.shift() > min_shift;
    run.write("ssd_uncontrolled.csv", histogram_csv(report.uncontrolled));
    run.write("ssd_controlled.csv", histogram_csv(report.controlled));
    if (pbn.size() <= 16) {
      run.write("ssd_uncontrolled.svg", render_histogram("uncontrolled", report.uncontrolled.dense()));
      run.write("ssd_controlled.svg", render_histogram("controlled", report.controlled.dense()));
    }
    const std::string text = dump_json(j);
    run.write("ssd_report.json", text);
    run.finish();
    std::cout << text;
    return report.shift() > min_shift ? kOk : kThresholdFail;
  }
  throw UsageError("--mode must be success, ssd or random");
}

int cmd_infer(Run& run, const std::string& expression, const std::string& genes_path, const InferenceOptions& options) {
  run.input("expression", expression);
  run.input("genes", genes_path);
  ExpressionMatrix data;
  std::vector<std::string> genes;
  try {
    data = parse_expression_csv(read_text_file(expression));
    genes = parse_gene_list(read_text_file(genes_path));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (genes.empty()) {
    throw InputError("no genes selected");
  }
  InferenceResult result;
  try {
    result = infer_pbn(data, genes, options);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::string report = "gene,inputs,cods,unobserved_combinations,constant_gene,threshold\n";
  for (const auto& node : result.nodes) {
    std::string inputs;
    std::string cods;
    for (std::size_t k = 0; k < node.inputs.size(); ++k) {
      inputs += (k ? ";" : "") + result.nodes[node.inputs[k]].gene;
      cods += (k ? ";" : "") + format_real(node.cods[k]);
    }
    report += node.gene + "," + inputs + "," + cods + "," + std::to_string(node.unobserved) + "," +
              (node.constant_gene ? "1" : "0") + "," + format_real(node.threshold) + "\n";
  }
  run.write("network.json", dump_json(model_to_json(result.model)));
  run.write("inference_report.csv", report);
  run.finish();
  for (const auto& node : result.nodes) {
    if (node.constant_gene) {
      std::cerr << "warning: gene '" << node.gene << "' is constant; assigned all-zero\n";
    }
  }
  std::cout << "inferred " << result.model.n_nodes << "-node network\n";
  return kOk;
}

int cmd_simulate(Run& run, const Shared& shared, const std::string& network, std::size_t steps,
                 const std::string& initial) {
  run.input("network", network);
  const Pbn pbn = build_pbn(network);
  Rng rng(shared.seed);
  NetworkState s;
  if (initial.empty()) {
    s = NetworkState::random(pbn.size(), rng);
  } else {
    if (initial.size() != pbn.size() || initial.find_first_not_of("01") != std::string::npos) {
      throw UsageError("--initial must be a " + std::to_string(pbn.size()) + "-bit string");
    }
    s = NetworkState::from_string(initial);
  }
  std::string csv = "t,state\n0," + s.to_string() + "\n";
  for (std::size_t t = 1; t <= steps; ++t) {
    s = pbn.step(s, rng);
    csv += std::to_string(t) + "," + s.to_string() + "\n";
  }
  run.write("trajectory.csv", csv);
  run.finish();
  return kOk;
}

int cmd_fixtures(Run& run) {
  for (const auto& name : fixture_names()) {
    const PbnModel model = fixture_model(name);
    run.write("networks/" + name + ".json", dump_json(model_to_json(model)));
    const Pbn pbn(model);
    const ControlTask task = fixture_task(name, pbn);
    run.write("tasks/" + name + ".json", dump_json(task_to_json(task, false)));
  }
  for (const auto& name : preset_names()) {
    run.write("presets/" + name + ".json", dump_json(config_to_json(preset(name))));
  }
  run.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic Boolean network analysis and DDQN control"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::vector<std::string> args(argv + 1, argv + argc);
  std::function<int()> action;
  Shared shared;

  auto make_run = [&](const std::string& command) {
    return Run(command, args, fs::path(shared.out), shared.seed);
  };

  std::string network;
  std::string task_arg;

  auto* validate = app.add_subcommand("validate", "Check a network file against the model rules");
  validate->add_option("network", network, "Network JSON or fixture:NAME")->required();
  validate->callback([&] { action = [&] { return cmd_validate(network); }; });

  std::size_t occupancy_runs = 0;
  std::size_t max_steps = 10000;
  std::size_t max_nodes = kDefaultExactNodeCap;
  auto* attractors = app.add_subcommand("attractors", "Bottom strongly connected components of the network");
  attractors->add_option("network", network, "Network JSON or fixture:NAME")->required();
  attractors->add_option("--occupancy", occupancy_runs, "Monte-Carlo runs for absorption fractions (0 = skip)");
  attractors->add_option("--max-steps", max_steps, "Step cap per occupancy run")->capture_default_str();
  attractors->add_option("--max-nodes", max_nodes, "Exact-analysis node cap")->capture_default_str();
  add_shared(attractors, shared);
  attractors->callback([&] {
    action = [&] {
      Run run = make_run("attractors");
      return cmd_attractors(run, shared, network, occupancy_runs, max_steps, max_nodes);
    };
  });

  bool exact = false;
  std::size_t runs = 300;
  std::size_t steps = 4000;
  std::size_t burn_in = 0;
  std::string policy_path;
  auto* ssd = app.add_subcommand("ssd", "Steady-state distribution (exact or Monte-Carlo)");
  ssd->add_option("network", network, "Network JSON or fixture:NAME")->required();
  ssd->add_flag("--exact", exact, "Power iteration on the full transition matrix");
  ssd->add_option("--runs", runs, "Monte-Carlo runs")->capture_default_str();
  ssd->add_option("--steps", steps, "Steps per run")->capture_default_str();
  ssd->add_option("--burn-in", burn_in, "Initial steps not counted")->capture_default_str();
  ssd->add_option("--policy", policy_path, "Checkpoint whose greedy policy intervenes each step");
  ssd->add_option("--task", task_arg, "Task JSON or fixture:NAME (desired-state mass, action mapping)");
  ssd->add_option("--max-nodes", max_nodes, "Exact-analysis node cap")->capture_default_str();
  add_shared(ssd, shared);
  ssd->callback([&] {
    action = [&] {
      Run run = make_run("ssd");
      return cmd_ssd(run, shared, network, exact, runs, steps, burn_in, policy_path, task_arg, max_nodes);
    };
  });

  std::string config_path;
  std::string preset_name;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> episodes_per_epoch;
  std::optional<std::size_t> total_steps;
  bool quiet = false;
  auto* train_cmd = app.add_subcommand("train", "Train a DDQN controller");
  train_cmd->add_option("--network", network, "Network JSON or fixture:NAME")->required();
  train_cmd->add_option("--task", task_arg, "Task JSON or fixture:NAME")->required();
  train_cmd->add_option("--config", config_path, "Training config JSON");
  train_cmd->add_option("--preset", preset_name, "Bundled preset name");
  train_cmd->add_option("--epochs", epochs, "Override the number of epochs");
  train_cmd->add_option("--episodes-per-epoch", episodes_per_epoch, "Override episodes per epoch");
  train_cmd->add_option("--total-steps", total_steps, "Override total environment steps");
  train_cmd->add_flag("--quiet", quiet, "No per-epoch progress on stderr");
  add_shared(train_cmd, shared);
  train_cmd->callback([&] {
    action = [&] {
      Run run = make_run("train");
      return cmd_train(run, shared, network, task_arg, config_path, preset_name, epochs, episodes_per_epoch,
                       total_steps, quiet);
    };
  });

  std::string checkpoint;
  std::string mode = "success";
  std::size_t attempts = 10;
  std::optional<std::size_t> horizon;
  std::size_t sample_states = 10000;
  double threshold = 0.98;
  double min_shift = 0.0;
  std::size_t random_max_steps = 1000000;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained controller");
  eval_cmd->add_option("--network", network, "Network JSON or fixture:NAME")->required();
  eval_cmd->add_option("--task", task_arg, "Task JSON or fixture:NAME")->required();
  eval_cmd->add_option("--checkpoint", checkpoint, "Trained parameters");
  eval_cmd->add_option("--mode", mode, "success, ssd or random")->capture_default_str();
  eval_cmd->add_option("--attempts", attempts, "Attempts per initial state")->capture_default_str();
  eval_cmd->add_option("--horizon", horizon, "Override the task horizon");
  eval_cmd->add_option("--sample-states", sample_states, "Initial states sampled for networks too large to enumerate")
      ->capture_default_str();
  std::size_t enumerate_up_to = 20;
  eval_cmd->add_option("--enumerate-up-to", enumerate_up_to, "Largest network swept over every initial state")
      ->capture_default_str();
  eval_cmd->add_option("--runs", runs, "SSD runs")->capture_default_str();
  eval_cmd->add_option("--steps", steps, "SSD steps per run")->capture_default_str();
  eval_cmd->add_option("--threshold", threshold, "Minimum success rate")->capture_default_str();
  eval_cmd->add_option("--min-shift", min_shift, "Desired-mass gain that must be exceeded")->capture_default_str();
  eval_cmd->add_option("--max-steps", random_max_steps, "Step cap per random-baseline attempt")
      ->capture_default_str();
  add_shared(eval_cmd, shared);
  eval_cmd->callback([&] {
    action = [&] {
      Run run = make_run("eval");
      return cmd_eval(run, shared, network, task_arg, checkpoint, mode, attempts, horizon, sample_states,
                      enumerate_up_to, runs, steps, threshold, min_shift, random_max_steps);
    };
  });

  std::string expression;
  std::string genes_path;
  InferenceOptions infer_options;
  auto* infer = app.add_subcommand("infer", "Infer a network from an expression matrix");
  infer->add_option("expression", expression, "CSV, one gene per row (name, values...)")->required();
  infer->add_option("--genes", genes_path, "File with one gene name per line")->required();
  infer->add_option("--max-inputs", infer_options.max_inputs, "Inputs per node")->capture_default_str();
  infer->add_option("--min-cod-gain", infer_options.min_cod_gain, "Stop below this COD")->capture_default_str();
  infer->add_option("--alpha", infer_options.laplace_alpha, "Laplace smoothing")->capture_default_str();
  std::string cod_error = "squared";
  infer->add_option("--cod-error", cod_error, "Predictor error for COD: squared or misclassification")
      ->check(CLI::IsMember({"squared", "misclassification"}))
      ->capture_default_str();
  add_shared(infer, shared);
  infer->callback([&] {
    action = [&] {
      Run run = make_run("infer");
      infer_options.cod_error = cod_error_from_string(cod_error);
      return cmd_infer(run, expression, genes_path, infer_options);
    };
  });

  std::size_t sim_steps = 100;
  std::string initial;
  auto* simulate = app.add_subcommand("simulate", "Sample one natural trajectory");
  simulate->add_option("network", network, "Network JSON or fixture:NAME")->required();
  simulate->add_option("--steps", sim_steps, "Trajectory length")->capture_default_str();
  simulate->add_option("--initial", initial, "Initial state bit string (default random)");
  add_shared(simulate, shared);
  simulate->callback([&] {
    action = [&] {
      Run run = make_run("simulate");
      return cmd_simulate(run, shared, network, sim_steps, initial);
    };
  });

  auto* fixtures = app.add_subcommand("fixtures", "Write the bundled networks, tasks and presets");
  add_shared(fixtures, shared);
  fixtures->callback([&] {
    action = [&] {
      Run run = make_run("fixtures");
      return cmd_fixtures(run);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const StateSpaceTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
