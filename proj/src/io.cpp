#include "pbnrl/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pbnrl/fixtures.hpp"

namespace pbnrl {
namespace {

template <class F>
auto parsing(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

std::size_t to_count(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InputError(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::string> state_strings(const StateSet& set) {
  std::vector<NetworkState> states(set.begin(), set.end());
  std::sort(states.begin(), states.end());
  std::vector<std::string> out;
  for (const auto& s : states) {
    out.push_back(s.to_string());
  }
  return out;
}

StateSet parse_state_set(const Json& list, std::size_t n) {
  StateSet out;
  for (const auto& item : list) {
    const auto text = item.get<std::string>();
    if (text.size() != n || text.find_first_not_of("01") != std::string::npos) {
      throw InputError("state '" + text + "' is not a " + std::to_string(n) + "-bit string");
    }
    out.insert(NetworkState::from_string(text));
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot read '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
    out << text;
    if (!out.flush()) {
      throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json model_to_json(const PbnModel& model) {
  Json nodes = Json::array();
  for (const auto& node : model.nodes) {
    Json jn;
    Json inputs = Json::array();
    for (int i : node.inputs) {
      inputs.push_back(i + 1);
    }
    jn["inputs"] = inputs;
    if (node.uses_stochastic_table()) {
      jn["stochastic_table"] = node.stochastic_table;
    } else {
      Json fs = Json::array();
      for (const auto& f : node.functions) {
        std::string table;
        for (auto bit : f.table) {
          table += static_cast<char>('0' + bit);
        }
        fs.push_back({{"table", table}, {"p", f.probability}});
      }
      jn["functions"] = fs;
    }
    nodes.push_back(jn);
  }
  return {{"name", model.name}, {"n_nodes", model.n_nodes}, {"nodes", nodes}};
}

PbnModel model_from_json(const Json& j) {
  return parsing("network file", [&] {
    PbnModel model;
    model.name = j.value("name", std::string{});
    model.n_nodes = to_count(j, "n_nodes");
    for (const auto& jn : j.at("nodes")) {
      NodeSpec node;
      for (const auto& i : jn.at("inputs")) {
        node.inputs.push_back(i.get<int>() - 1);
      }
      if (jn.contains("functions")) {
        for (const auto& jf : jn.at("functions")) {
          BooleanFunction f;
          for (char c : jf.at("table").get<std::string>()) {
            f.table.push_back(static_cast<std::uint8_t>(c == '0' ? 0 : c == '1' ? 1 : 2));
          }
          f.probability = jf.at("p").get<double>();
          node.functions.push_back(std::move(f));
        }
      }
      if (jn.contains("stochastic_table")) {
        node.stochastic_table = jn.at("stochastic_table").get<std::vector<double>>();
      }
      model.nodes.push_back(std::move(node));
    }
    return model;
  });
}

PbnModel load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

Json task_to_json(const ControlTask& task, bool explicit_undesired) {
  Json j;
  j["name"] = task.name;
  j["controllable"] = task.controllable;
  j["horizon"] = task.horizon;
  if (const auto* a = std::get_if<AttractorTarget>(&task.target)) {
    Json target{{"type", "attractor"}, {"desired", state_strings(a->desired)}};
    if (explicit_undesired) {
      Json undesired = Json::array();
      for (const auto& set : a->undesired) {
        undesired.push_back(state_strings(set));
      }
      target["undesired"] = undesired;
    } else {
      target["undesired"] = "auto";
    }
    j["target"] = target;
  } else {
    const auto& s = std::get<SubsetTarget>(task.target);
    j["target"] = {{"type", "subset"}, {"node", s.node}, {"value", s.value ? 1 : 0}};
  }
  const RewardParams& r = task.rewards;
  j["rewards"] = {{"success_reward", r.success_reward},
                  {"undesirable_attractor_penalty", r.undesirable_attractor_penalty},
                  {"step_penalty", r.step_penalty},
                  {"subset_good", r.subset_good},
                  {"subset_bad", r.subset_bad},
                  {"action_cost", r.action_cost}};
  return j;
}

ControlTask task_from_json(const Json& j, const Pbn& pbn) {
  return parsing("task file", [&] {
    const std::size_t n = pbn.size();
    ControlTask task;
    task.name = j.value("name", std::string{"task"});
    const auto& ctrl = j.at("controllable");
    if (ctrl.is_string()) {
      if (ctrl.get<std::string>() != "all") {
        throw InputError("'controllable' must be \"all\" or a list of node numbers");
      }
      for (std::size_t i = 1; i <= n; ++i) {
        task.controllable.push_back(i);
      }
    } else {
      for (const auto& v : ctrl) {
        const long long node = v.get<long long>();
        task.controllable.push_back(node < 0 ? 0 : static_cast<std::size_t>(node));
      }
    }
    const auto& target = j.at("target");
    const auto type = target.at("type").get<std::string>();
    if (type == "subset") {
      task.target = SubsetTarget{to_count(target, "node"), target.at("value").get<int>() != 0};
      task.horizon = 100;
    } else if (type == "attractor") {
      task.horizon = 1;
    } else {
      throw InputError("target type must be \"attractor\" or \"subset\"");
    }
    if (j.contains("horizon")) {
      task.horizon = to_count(j, "horizon");
    }
    if (const auto rj = j.find("rewards"); rj != j.end()) {
      RewardParams& r = task.rewards;
      r.success_reward = rj->value("success_reward", r.success_reward);
      r.undesirable_attractor_penalty = rj->value("undesirable_attractor_penalty", r.undesirable_attractor_penalty);
      r.step_penalty = rj->value("step_penalty", r.step_penalty);
      r.subset_good = rj->value("subset_good", r.subset_good);
      r.subset_bad = rj->value("subset_bad", r.subset_bad);
      r.action_cost = rj->value("action_cost", r.action_cost);
    }
    if (type == "attractor") {
      std::vector<NetworkState> desired;
      for (auto& s : parse_state_set(target.at("desired"), n)) {
        desired.push_back(s);
      }
      std::sort(desired.begin(), desired.end());
      const auto& undesired = target.contains("undesired") ? target.at("undesired") : Json("auto");
      if (undesired.is_string()) {
        if (undesired.get<std::string>() != "auto") {
          throw InputError("'undesired' must be \"auto\" or a list of state lists");
        }
        auto built = make_attractor_task(pbn, task.name, std::move(desired), task.horizon, task.rewards);
        built.controllable = task.controllable;
        return built;
      }
      AttractorTarget t;
      for (auto& s : desired) {
        t.desired.insert(s);
      }
      for (const auto& set : undesired) {
        t.undesired.push_back(parse_state_set(set, n));
      }
      task.target = std::move(t);
    }
    return task;
  });
}

ControlTask load_task(const std::filesystem::path& path, const Pbn& pbn) {
  return task_from_json(read_json_file(path), pbn);
}

Json config_to_json(const TrainConfig& c) {
  Json j;
  j["name"] = c.name;
  j["gamma"] = c.gamma;
  j["min_epsilon"] = c.min_epsilon;
  j["exploration_fraction"] = c.exploration_fraction;
  j["omega"] = c.omega;
  j["beta0"] = c.beta0;
  j["beta_fraction"] = c.beta_fraction;
  j["learning_rate"] = c.learning_rate;
  j["priority_offset"] = c.priority_offset;
  j["huber_delta"] = c.huber_delta;
  j["batch_size"] = c.batch_size;
  j["buffer_capacity"] = c.buffer_capacity;
  j["target_update_interval"] = c.target_update_interval;
  j["target_update_unit"] = to_string(c.target_update_unit);
  j["hidden"] = c.hidden;
  j["horizon"] = c.horizon ? Json(*c.horizon) : Json(nullptr);
  j["success_reward"] = c.success_reward ? Json(*c.success_reward) : Json(nullptr);
  if (const auto* e = std::get_if<EpisodicSchedule>(&c.schedule)) {
    j["schedule"] = {{"type", "episodic"}, {"n_epochs", e->n_epochs}, {"episodes_per_epoch", e->episodes_per_epoch}};
  } else {
    const auto& s = std::get<StepwiseSchedule>(c.schedule);
    j["schedule"] = {{"type", "stepwise"}, {"total_steps", s.total_steps}, {"window", s.window}};
  }
  j["seed"] = c.seed;
  return j;
}

TrainConfig config_from_json(const Json& j) {
  return parsing("training config", [&] {
    TrainConfig c;
    if (j.contains("preset")) {
      try {
        c = preset(j.at("preset").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
    }
    c.name = j.value("name", c.name);
    c.gamma = j.value("gamma", c.gamma);
    c.min_epsilon = j.value("min_epsilon", c.min_epsilon);
    c.exploration_fraction = j.value("exploration_fraction", c.exploration_fraction);
    c.omega = j.value("omega", c.omega);
    c.beta0 = j.value("beta0", c.beta0);
    c.beta_fraction = j.value("beta_fraction", c.beta_fraction);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.priority_offset = j.value("priority_offset", c.priority_offset);
    c.huber_delta = j.value("huber_delta", c.huber_delta);
    if (j.contains("batch_size")) c.batch_size = to_count(j, "batch_size");
    if (j.contains("buffer_capacity")) c.buffer_capacity = to_count(j, "buffer_capacity");
    if (j.contains("target_update_interval")) c.target_update_interval = to_count(j, "target_update_interval");
    if (j.contains("target_update_unit")) {
      try {
        c.target_update_unit = target_update_unit_from_string(j.at("target_update_unit").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
    }
    if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    if (j.contains("horizon")) {
      c.horizon = j.at("horizon").is_null() ? std::nullopt : std::optional<std::size_t>(to_count(j, "horizon"));
    }
    if (j.contains("success_reward")) {
      c.success_reward = j.at("success_reward").is_null() ? std::nullopt
                                                          : std::optional<double>(j.at("success_reward").get<double>());
    }
    if (const auto s = j.find("schedule"); s != j.end()) {
      const auto type = s->at("type").get<std::string>();
      if (type == "episodic") {
        c.schedule = EpisodicSchedule{to_count(*s, "n_epochs"), to_count(*s, "episodes_per_epoch")};
      } else if (type == "stepwise") {
        c.schedule = StepwiseSchedule{to_count(*s, "total_steps"), s->contains("window") ? to_count(*s, "window") : 1000};
      } else {
        throw InputError("schedule type must be \"episodic\" or \"stepwise\"");
      }
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  });
}

Json params_to_json(const QParams& params) {
  Json layers = Json::array();
  for (const auto& l : params.layers) {
    std::vector<float> w;
    w.reserve(static_cast<std::size_t>(l.weight.size()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        w.push_back(l.weight(r, c));
      }
    }
    std::vector<float> b(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back({{"rows", l.weight.rows()}, {"cols", l.weight.cols()}, {"weight", w}, {"bias", b}});
  }
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"spec",
           {{"input_size", params.spec.input_size},
            {"hidden", params.spec.hidden},
            {"output_size", params.spec.output_size}}},
          {"layers", layers}};
}

QParams params_from_json(const Json& j) {
  return parsing("checkpoint", [&] {
    if (j.value("format", std::string{}) != kCheckpointFormat) {
      throw InputError(std::string("checkpoint: missing format tag '") + kCheckpointFormat + "'");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw InputError("checkpoint: unsupported version " + j.at("version").dump());
    }
    QParams p;
    const auto& spec = j.at("spec");
    p.spec.input_size = to_count(spec, "input_size");
    p.spec.hidden = spec.at("hidden").get<std::vector<std::size_t>>();
    p.spec.output_size = to_count(spec, "output_size");
    try {
      p.spec.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("checkpoint: ") + e.what());
    }
    const auto widths = p.spec.widths();
    const auto& layers = j.at("layers");
    if (layers.size() + 1 != widths.size()) {
      throw InputError("checkpoint: layer count does not match the spec");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto rows = static_cast<Eigen::Index>(widths[l + 1]);
      const auto cols = static_cast<Eigen::Index>(widths[l]);
      const auto w = layers[l].at("weight").get<std::vector<float>>();
      const auto b = layers[l].at("bias").get<std::vector<float>>();
      if (to_count(layers[l], "rows") != widths[l + 1] || to_count(layers[l], "cols") != widths[l] ||
          w.size() != static_cast<std::size_t>(rows * cols) || b.size() != static_cast<std::size_t>(rows)) {
        throw InputError("checkpoint: layer " + std::to_string(l + 1) + " has the wrong shape");
      }
      DenseLayer<float> layer{Matrix<float>(rows, cols), Vector<float>(rows)};
      std::size_t k = 0;
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
          layer.weight(r, c) = w[k++];
        }
      }
      for (Eigen::Index r = 0; r < rows; ++r) {
        layer.bias(r) = b[static_cast<std::size_t>(r)];
      }
      p.layers.push_back(std::move(layer));
    }
    if (!p.all_finite()) {
      throw InputError("checkpoint: non-finite parameters");
    }
    return p;
  });
}

QParams load_checkpoint(const std::filesystem::path& path) { return params_from_json(read_json_file(path)); }

Json attractors_to_json(const AttractorSet& set, const OccupancyEstimate* occupancy) {
  Json list = Json::array();
  for (std::size_t k = 0; k < set.attractors.size(); ++k) {
    const auto& a = set.attractors[k];
    Json states = Json::array();
    for (auto index : a.states) {
      states.push_back(NetworkState::from_index(index, set.n_nodes).to_string());
    }
    Json entry{{"size", a.states.size()}, {"fixed_point", a.is_fixed_point()}, {"states", states}};
    if (occupancy != nullptr) {
      entry["occupancy"] = occupancy->fraction[k];
      entry["occupancy_standard_error"] = occupancy->standard_error[k];
    }
    list.push_back(entry);
  }
  Json j{{"n_nodes", set.n_nodes}, {"attractor_count", set.attractors.size()}, {"attractors", list}};
  if (occupancy != nullptr) {
    j["occupancy_runs"] = occupancy->runs;
    j["occupancy_max_steps"] = occupancy->max_steps;
    j["unabsorbed"] = occupancy->unabsorbed;
  }
  return j;
}

Json success_report_to_json(const SuccessReport& r) {
  return {{"mode", "success"},
          {"horizon", r.horizon},
          {"attempts_per_state", r.attempts_per_state},
          {"exhaustive", r.exhaustive},
          {"initial_states", r.initial_states},
          {"attempts", r.attempts},
          {"successes", r.successes},
          {"success_rate", r.success_rate},
          {"standard_error", r.standard_error},
          {"mean_perturbations", r.mean_perturbations},
          {"perturbation_counts", r.perturbation_counts}};
}

Json random_baseline_to_json(const RandomBaselineReport& r) {
  return {{"initial_states", r.initial_states}, {"attempts", r.attempts},     {"censored", r.censored},
          {"mean_steps", r.mean_steps},         {"mean_perturbations", r.mean_perturbations}};
}

Json ssd_shift_to_json(const SsdShiftReport& r) {
  return {{"mode", "ssd"},
          {"runs", r.runs},
          {"steps", r.steps},
          {"uncontrolled_mass", r.uncontrolled_mass},
          {"uncontrolled_standard_error", r.uncontrolled.predicate_mass_se},
          {"controlled_mass", r.controlled_mass},
          {"controlled_standard_error", r.controlled.predicate_mass_se},
          {"shift", r.shift()},
          {"pooled_standard_error", r.pooled_standard_error},
          {"uncontrolled_distinct_states", r.uncontrolled.distribution.size()},
          {"controlled_distinct_states", r.controlled.distribution.size()}};
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows, const std::string& index_label) {
  std::string out = index_label + ",avg_perturbations,avg_reward,epsilon,beta,loss,success_rate,episodes,env_steps\n";
  for (const auto& r : rows) {
    out += std::to_string(r.index) + "," + format_real(r.avg_perturbations) + "," + format_real(r.avg_reward) + "," +
           format_real(r.epsilon) + "," + format_real(r.beta) + "," + format_real(r.loss) + "," +
           format_real(r.success_rate) + "," + std::to_string(r.episodes) + "," + std::to_string(r.env_steps) + "\n";
  }
  return out;
}

std::string histogram_csv(const StateHistogram& hist) {
  const bool indexed = hist.n_nodes <= 64;
  std::string out = indexed ? "state,index,probability\n" : "state,probability\n";
  for (const auto& [state, p] : hist.distribution) {
    out += state.to_string() + ",";
    if (indexed) {
      out += std::to_string(state.to_index()) + ",";
    }
    out += format_real(p) + "\n";
  }
  return out;
}

std::string dense_distribution_csv(std::size_t n_nodes, const std::vector<double>& p) {
  std::string out = "state,index,probability\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += NetworkState::from_index(i, n_nodes).to_string() + "," + std::to_string(i) + "," + format_real(p[i]) + "\n";
  }
  return out;
}

std::string per_state_success_csv(const SuccessReport& report) {
  std::string out = "state,successes,attempts,success_rate\n";
  for (const auto& s : report.per_state) {
    out += s.initial.to_string() + "," + std::to_string(s.successes) + "," +
           std::to_string(report.attempts_per_state) + "," +
           format_real(static_cast<double>(s.successes) / static_cast<double>(report.attempts_per_state)) + "\n";
  }
  return out;
}

}  // namespace pbnrl
