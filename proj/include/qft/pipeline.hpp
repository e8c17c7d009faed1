#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qft/bounds.hpp"
#include "qft/io/config.hpp"
#include "qft/loop_shaping.hpp"
#include "qft/road_sim.hpp"

namespace qft::pipeline {

using nlohmann::json;

/// Plants, templates and bounds for one configuration. Independent of the controller.
struct Workbench {
  io::RunConfig config;
  std::vector<suspension::PlantInstance> plants;
  std::vector<double> phases;
  std::vector<bounds::FrequencyBounds> bounds;
};

Workbench build_workbench(const io::RunConfig& config);

/// Open- and closed-loop runs of one road scenario on the nominal plant.
struct ScenarioRun {
  std::string name;
  Eigen::VectorXd road;
  road::SimResult open;
  road::SimResult closed;
  road::ResponseMetrics open_metrics;
  road::ResponseMetrics closed_metrics;
};

ScenarioRun run_scenario(const suspension::PlantInstance& plant, const shaping::ControllerDesign& design,
                         const road::RoadProfile& profile, const io::SimulationSettings& sim);

json scenario_metrics_json(const ScenarioRun& run);

struct Check {
  std::string id;
  std::string description;
  bool pass = false;
  json details;
};

struct VerifyResult {
  std::vector<Check> checks;
  json report;
  bool pass = false;
};

/// Full reproduction pipeline: model constants, interval report,
/// controller reconstruction, bound solver vs oracle, design check at DC,
/// simulation properties and envelopes. Writes report.json, bounds.csv,
/// templates.csv, per-scenario CSVs, metrics JSON and SVG plots to out_dir.
VerifyResult run_verify(const io::RunConfig& config, const shaping::ControllerDesign& design,
                        const std::filesystem::path& out_dir);

/// Observed order of a one-step method from errors at h, h/2, h/4:
/// log2(|y_h - y_h/2| / |y_h/2 - y_h/4|).
double observed_order(double coarse_diff, double fine_diff);

}  // namespace qft::pipeline
