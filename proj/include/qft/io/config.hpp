#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qft/bounds.hpp"
#include "qft/design_specs.hpp"
#include "qft/loop_shaping.hpp"
#include "qft/road_sim.hpp"
#include "qft/suspension.hpp"

namespace qft::io {

using nlohmann::json;

/// Raised for malformed configuration or data files; carries the JSON path
/// or field that failed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulationSettings {
  double dt = 1e-3;
  double horizon = 10.0;
};

struct RunConfig {
  suspension::UncertaintySet plant;
  specs::TrackingSpec tracking = specs::TrackingSpec::published();
  specs::DisturbanceSpec disturbance = specs::DisturbanceSpec::published();
  specs::FrequencyGrid grid;
  double phase_step_deg = 5.0;
  int levels = 3;
  std::optional<std::filesystem::path> controller_file;
  std::vector<road::RoadProfile> scenarios;
  SimulationSettings simulation;
  std::uint64_t seed = 20180101;
  std::filesystem::path out_dir = "out";

  std::vector<double> phase_grid() const { return bounds::default_phase_grid(phase_step_deg); }
};

/// Default scenarios: two bumps, impulse and white noise at their default settings.
std::vector<road::RoadProfile> default_scenarios(std::uint64_t seed);

/// Plant parameter document with `nominal`, `half_ranges` and `fixed` sections.
suspension::UncertaintySet parse_plant_params(const json& j);
json plant_params_to_json(const suspension::UncertaintySet& u);

/// Run configuration. Relative file references resolve against base_dir.
RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
json run_config_to_json(const RunConfig& c);

road::RoadProfile parse_road_profile(const json& j, std::uint64_t default_seed);
json road_profile_to_json(const road::RoadProfile& p);

/// Controller file: JSON list of {kind, params} elements.
shaping::ControllerDesign parse_controller(const json& j);
json controller_to_json(const shaping::ControllerDesign& d);
shaping::ControllerDesign load_controller(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);

/// Write to a sibling temporary file and rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace qft::io
