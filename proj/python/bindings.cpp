#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pbnrl/agent.hpp"
#include "pbnrl/analysis.hpp"
#include "pbnrl/eval.hpp"
#include "pbnrl/fixtures.hpp"
#include "pbnrl/inference.hpp"
#include "pbnrl/io.hpp"

namespace py = pybind11;
using namespace pbnrl;

namespace {

Pbn network_from(const std::string& text) { return Pbn(model_from_json(Json::parse(text))); }

ControlTask task_from(const std::string& text, const Pbn& pbn) {
  ControlTask task = task_from_json(Json::parse(text), pbn);
  const auto problems = validate_task(task, pbn.size());
  if (!problems.empty()) throw InputError("invalid task: " + problems.front());
  return task;
}

NetworkState state_from(const std::string& bits, const Pbn& pbn) {
  NetworkState s = NetworkState::from_string(bits);
  if (s.size() != pbn.size()) throw InputError("state has " + std::to_string(s.size()) + " bits, network has " +
                                               std::to_string(pbn.size()) + " nodes");
  return s;
}

}  // namespace

PYBIND11_MODULE(_pbnrl, m) {
  m.doc() = "Probabilistic Boolean network simulation, analysis and DDQN control";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<StateSpaceTooLarge>(m, "StateSpaceTooLarge", PyExc_ValueError);

  m.def("fixture_names", &fixture_names);
  m.def("fixture_network", [](const std::string& name) { return dump_json(model_to_json(fixture_model(name))); });
  m.def("fixture_task", [](const std::string& name) {
    const Pbn pbn(fixture_model(name));
    return dump_json(task_to_json(fixture_task(name, pbn), false));
  });
  m.def("preset_names", &preset_names);
  m.def("preset", [](const std::string& name) { return dump_json(config_to_json(preset(name))); });

  m.def("validate_network", [](const std::string& text) {
    std::vector<std::string> out;
    for (const auto& v : validate_model(model_from_json(Json::parse(text)))) out.push_back(v.message);
    return out;
  });

  m.def("transition_probability", [](const std::string& network, const std::string& from, const std::string& to) {
    const Pbn pbn = network_from(network);
    return pbn.transition_probability(state_from(from, pbn), state_from(to, pbn));
  });

  m.def(
      "simulate",
      [](const std::string& network, const std::string& initial, std::size_t steps, std::uint64_t seed) {
        const Pbn pbn = network_from(network);
        Rng rng(seed);
        NetworkState s = initial.empty() ? NetworkState::random(pbn.size(), rng) : state_from(initial, pbn);
        std::vector<std::string> out{s.to_string()};
        for (std::size_t t = 0; t < steps; ++t) {
          s = pbn.step(s, rng);
          out.push_back(s.to_string());
        }
        return out;
      },
      py::arg("network"), py::arg("initial") = "", py::arg("steps") = 100, py::arg("seed") = 0);

  m.def(
      "attractors",
      [](const std::string& network, std::size_t occupancy_runs, std::size_t max_steps, std::uint64_t seed) {
        const Pbn pbn = network_from(network);
        const AttractorSet set = find_attractors(pbn);
        if (occupancy_runs == 0) return dump_json(attractors_to_json(set));
        const OccupancyEstimate est = estimate_attractor_occupancy(pbn, set, occupancy_runs, max_steps, seed);
        return dump_json(attractors_to_json(set, &est));
      },
      py::arg("network"), py::arg("occupancy_runs") = 0, py::arg("max_steps") = 10000, py::arg("seed") = 0);

  m.def("exact_ssd", [](const std::string& network) { return exact_ssd(build_transition_matrix(network_from(network))); });

  m.def(
      "monte_carlo_ssd",
      [](const std::string& network, std::size_t runs, std::size_t steps, std::size_t burn_in, std::uint64_t seed) {
        MonteCarloOptions options;
        options.runs = runs;
        options.steps_per_run = steps;
        options.burn_in = burn_in;
        options.seed = seed;
        const StateHistogram hist = monte_carlo_ssd(network_from(network), options);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& [state, p] : hist.distribution) out.emplace_back(state.to_string(), p);
        return out;
      },
      py::arg("network"), py::arg("runs") = 300, py::arg("steps") = 4000, py::arg("burn_in") = 0,
      py::arg("seed") = 0);

  m.def(
      "train",
      [](const std::string& network, const std::string& task, const std::string& config) {
        const Pbn pbn = network_from(network);
        const ControlTask t = task_from(task, pbn);
        const TrainConfig c = config_from_json(Json::parse(config));
        TrainArtifacts art;
        {
          py::gil_scoped_release release;
          art = train(pbn, t, c);
        }
        return py::make_tuple(dump_json(params_to_json(art.params)),
                              metrics_csv(art.metrics, c.episodic() ? "epoch" : "window"));
      },
      py::arg("network"), py::arg("task"), py::arg("config"));

  m.def(
      "success_sweep",
      [](const std::string& network, const std::string& task, const std::string& checkpoint, std::size_t horizon,
         std::size_t attempts, std::size_t sample_states, std::uint64_t seed) {
        const Pbn pbn = network_from(network);
        const ControlTask t = task_from(task, pbn);
        SweepOptions options;
        if (horizon > 0) options.horizon = horizon;
        options.attempts_per_state = attempts;
        options.sample_states = sample_states;
        options.seed = seed;
        const Policy policy = greedy_policy(params_from_json(Json::parse(checkpoint)));
        py::gil_scoped_release release;
        const SuccessReport report = success_sweep(pbn, t, policy, options);
        py::gil_scoped_acquire acquire;
        return dump_json(success_report_to_json(report));
      },
      py::arg("network"), py::arg("task"), py::arg("checkpoint"), py::arg("horizon") = 0, py::arg("attempts") = 10,
      py::arg("sample_states") = 10000, py::arg("seed") = 0);

  m.def(
      "infer",
      [](const std::string& expression_csv, const std::vector<std::string>& genes, std::size_t max_inputs,
         double min_cod_gain, double alpha) {
        InferenceOptions options;
        options.max_inputs = max_inputs;
        options.min_cod_gain = min_cod_gain;
        options.laplace_alpha = alpha;
        const InferenceResult result = infer_pbn(parse_expression_csv(expression_csv), genes, options);
        return dump_json(model_to_json(result.model));
      },
      py::arg("expression_csv"), py::arg("genes"), py::arg("max_inputs") = 3, py::arg("min_cod_gain") = 0.05,
      py::arg("alpha") = 0.0);
}
