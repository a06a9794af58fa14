#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbnrl/agent.hpp"
#include "pbnrl/analysis.hpp"
#include "pbnrl/env.hpp"
#include "pbnrl/eval.hpp"
#include "pbnrl/model.hpp"

namespace pbnrl {

using Json = nlohmann::ordered_json;

/// Unreadable or malformed input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCheckpointFormat = "pbnrl-qnetwork";
inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kManifestFormat = "pbnrl-manifest";
inline constexpr int kManifestVersion = 1;

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);
Json read_json_file(const std::filesystem::path& path);
/// Two-space indented, trailing newline.
std::string dump_json(const Json& j);

Json model_to_json(const PbnModel& model);
/// Structural parse only; semantic checks are validate_model's job.
PbnModel model_from_json(const Json& j);
PbnModel load_model(const std::filesystem::path& path);

/// With explicit_undesired = false the undesired sets are written as "auto"
/// (recomputed from the network on load).
Json task_to_json(const ControlTask& task, bool explicit_undesired = true);
ControlTask task_from_json(const Json& j, const Pbn& pbn);
ControlTask load_task(const std::filesystem::path& path, const Pbn& pbn);

Json config_to_json(const TrainConfig& config);
/// Accepts an optional "preset" key whose values the other keys override.
TrainConfig config_from_json(const Json& j);

Json params_to_json(const QParams& params);
QParams params_from_json(const Json& j);
QParams load_checkpoint(const std::filesystem::path& path);

Json attractors_to_json(const AttractorSet& set, const OccupancyEstimate* occupancy = nullptr);
Json success_report_to_json(const SuccessReport& report);
Json random_baseline_to_json(const RandomBaselineReport& report);
Json ssd_shift_to_json(const SsdShiftReport& report);

std::string metrics_csv(const std::vector<MetricsRow>& rows, const std::string& index_label = "epoch");
/// Columns state,index,probability (index omitted above 64 nodes).
std::string histogram_csv(const StateHistogram& hist);
std::string dense_distribution_csv(std::size_t n_nodes, const std::vector<double>& p);
std::string per_state_success_csv(const SuccessReport& report);

/// Fixed-format real for CSV cells.
std::string format_real(double v);

}  // namespace pbnrl
