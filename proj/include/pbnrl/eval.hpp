#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pbnrl/agent.hpp"
#include "pbnrl/analysis.hpp"
#include "pbnrl/env.hpp"
#include "pbnrl/pbn.hpp"

namespace pbnrl {

struct SweepOptions {
  std::size_t attempts_per_state = 10;
  std::optional<std::size_t> horizon;  // defaults to the task horizon
  /// Networks up to this size are swept over every initial state; larger
  /// ones over `sample_states` uniform draws.
  std::size_t max_enumerated_nodes = 20;
  std::size_t sample_states = 10000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct StateSuccess {
  NetworkState initial;
  std::size_t successes = 0;
};

struct SuccessReport {
  std::size_t horizon = 0;
  std::size_t attempts_per_state = 0;
  bool exhaustive = true;
  std::size_t initial_states = 0;
  std::size_t attempts = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double standard_error = 0.0;  // binomial
  std::vector<StateSuccess> per_state;
  /// perturbation_counts[k] = attempts that used exactly k non-zero actions.
  std::vector<std::size_t> perturbation_counts;
  double mean_perturbations = 0.0;
};

/// Runs `attempts_per_state` greedy episodes from every (or a sample of)
/// initial state. An attempt succeeds once a desired state is observed
/// within the horizon; a desired initial state succeeds with no steps.
/// Attempt (k, a) uses its own random stream, so runs with a larger horizon
/// extend the same trajectories.
SuccessReport success_sweep(const Pbn& pbn, const ControlTask& task, const Policy& policy,
                            const SweepOptions& options);

struct RandomBaselineReport {
  std::size_t initial_states = 0;
  std::size_t attempts = 0;
  std::size_t censored = 0;  // attempts that hit max_steps
  double mean_steps = 0.0;
  double mean_perturbations = 0.0;
};

/// Uniform random actions until a desired state is reached. Every step
/// counts towards mean_steps; mean_perturbations counts non-zero actions.
RandomBaselineReport random_perturbation_baseline(const Pbn& pbn, const ControlTask& task,
                                                  const SweepOptions& options, std::size_t max_steps);

struct SsdShiftReport {
  std::size_t runs = 0;
  std::size_t steps = 0;
  StateHistogram uncontrolled;
  StateHistogram controlled;
  double uncontrolled_mass = 0.0;
  double controlled_mass = 0.0;
  double pooled_standard_error = 0.0;
  double shift() const { return controlled_mass - uncontrolled_mass; }
};

/// Monte-Carlo SSD with and without the controller; desirable mass is the
/// fraction of samples satisfying the subset target. Subset-mode tasks only
/// (std::invalid_argument otherwise).
SsdShiftReport ssd_shift(const Pbn& pbn, const ControlTask& task, const Policy& policy, std::size_t runs,
                         std::size_t steps, std::uint64_t seed, std::size_t threads = 1);

/// SVG bar chart of a dense distribution over state indices.
std::string render_histogram(const std::string& title, const std::vector<double>& probabilities);

struct CurveFiles {
  std::filesystem::path csv;
  std::filesystem::path perturbations_svg;
  std::filesystem::path reward_svg;
};

/// SVG line chart of y against x. Output is a pure function of the input.
std::string render_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<double>& x, const std::vector<double>& y);

/// Writes the metrics CSV and two charts (average perturbations and average
/// reward per epoch/window) into `dir`. Throws on an empty log.
CurveFiles training_curves(const std::vector<MetricsRow>& metrics, const std::filesystem::path& dir,
                           const std::string& title = "training");

}  // namespace pbnrl
