// qft: command-line front end for the suspension QFT workbench.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qft/api/http.hpp"
#include "qft/api/service.hpp"
#include "qft/io/csv.hpp"
#include "qft/io/serialize.hpp"
#include "qft/io/svg.hpp"
#include "qft/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qft;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kSpecFailure = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::string controller;
  std::string out;
  int levels = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<double> freqs;
  bool svg = false;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string save;
};

/// Raised for bad inputs discovered after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

io::RunConfig load_config(const Options& o) {
  io::RunConfig c = o.config.empty() ? io::parse_run_config(json::object(), fs::current_path()) : io::load_run_config(o.config);
  if (o.levels > 0) c.levels = o.levels;
  if (o.seed_set) {
    c.seed = o.seed;
    for (auto& s : c.scenarios) {
      if (auto* w = std::get_if<road::WhiteNoise>(&s)) w->seed = o.seed;
    }
  }
  if (!o.freqs.empty()) c.grid = specs::FrequencyGrid(o.freqs);
  if (!o.out.empty()) c.out_dir = o.out;
  return c;
}

shaping::ControllerDesign load_design(const Options& o, const io::RunConfig& c) {
  if (!o.controller.empty()) return io::load_controller(o.controller);
  if (c.controller_file) return io::load_controller(*c.controller_file);
  throw UsageError("no controller: pass --controller or set 'controller' in the config");
}

const suspension::PlantInstance& nominal_of(const std::vector<suspension::PlantInstance>& plants) {
  return plants[suspension::nominal_index(plants)];
}

int cmd_plant(const Options& o) {
  const auto c = load_config(o);
  const auto plants = suspension::sample_plants(c.plant, c.levels);
  const auto& p = nominal_of(plants);
  json out = io::plant_instance_to_json(p);
  out["instances"] = plants.size();
  std::cout << out.dump(2) << "\n";
  if (!o.out.empty()) io::write_file_atomic(c.out_dir / "plant.json", out.dump(2) + "\n");
  return kOk;
}

int cmd_template(const Options& o) {
  const auto c = load_config(o);
  const auto wb = pipeline::build_workbench(c);
  std::vector<bounds::Template> templates;
  for (const auto& fb : wb.bounds) templates.push_back(fb.tmpl);
  io::write_file_atomic(c.out_dir / "templates.csv", io::write_templates_csv(templates));
  for (const auto& t : templates) {
    std::cout << "omega=" << t.omega << " plants=" << t.size() << " spread_db=" << bounds::template_spread_db(t) << "\n";
  }
  if (o.svg) io::write_file_atomic(c.out_dir / "templates.svg", io::nichols_chart_svg(wb.bounds, {}, true));
  return kOk;
}

int cmd_bounds(const Options& o) {
  const auto c = load_config(o);
  const auto wb = pipeline::build_workbench(c);
  std::vector<bounds::BoundCurve> curves;
  for (const auto& fb : wb.bounds) {
    curves.push_back(fb.tracking);
    curves.push_back(fb.disturbance);
    curves.push_back(fb.combined);
    std::cout << "omega=" << fb.tmpl.omega << " empty_phases=" << (fb.combined.has_empty_phase() ? "yes" : "no") << "\n";
  }
  io::write_file_atomic(c.out_dir / "bounds.csv", io::write_bounds_csv(curves));
  if (o.svg) io::write_file_atomic(c.out_dir / "nichols.svg", io::nichols_chart_svg(wb.bounds, {}, false));
  return kOk;
}

int cmd_shape(const Options& o) {
  const auto c = load_config(o);
  const auto design = load_design(o, c);
  const auto G = shaping::compose_controller(design);
  const auto plants = suspension::sample_plants(c.plant, c.levels);
  const auto report = shaping::validate_design(design, plants, c.tracking, c.disturbance, c.grid);
  std::cout << "num:";
  for (double v : G.num().to_vector()) std::cout << " " << io::format_double(v);
  std::cout << "\nden:";
  for (double v : G.den().to_vector()) std::cout << " " << io::format_double(v);
  std::cout << "\n";
  for (const auto& v : report.frequencies) {
    std::cout << "omega=" << v.omega << " |T|max=" << v.worst_tracking << (v.tracking_ok ? " ok" : " FAIL")
              << " |S|max=" << v.worst_disturbance << (v.disturbance_ok ? " ok" : " FAIL") << "\n";
  }
  std::cout << "nominal_stable=" << report.nominal_stable << " robust_stable=" << report.robust_stable
            << " all_specs_met=" << report.all_specs_met << "\n";
  if (!o.out.empty()) {
    json out = {{"controller", io::controller_to_json(design)}, {"tf", io::tf_to_json(G)}, {"loop_report", io::loop_report_to_json(report)}};
    io::write_file_atomic(c.out_dir / "shape.json", out.dump(2) + "\n");
  }
  return report.all_specs_met ? kOk : kSpecFailure;
}

int cmd_simulate(const Options& o) {
  const auto c = load_config(o);
  const auto design = load_design(o, c);
  const auto plants = suspension::sample_plants(c.plant, 1);
  for (const auto& s : c.scenarios) {
    pipeline::ScenarioRun run;
    try {
      run = pipeline::run_scenario(nominal_of(plants), design, s, c.simulation);
    } catch (const road::UnstableLoopError& e) {
      spdlog::error("{}", e.what());
      return kSpecFailure;
    }
    io::write_file_atomic(c.out_dir / ("sim_" + run.name + "_open.csv"), io::write_sim_csv(run.open));
    io::write_file_atomic(c.out_dir / ("sim_" + run.name + "_closed.csv"), io::write_sim_csv(run.closed));
    io::write_file_atomic(c.out_dir / ("sim_" + run.name + "_metrics.json"), pipeline::scenario_metrics_json(run).dump(2) + "\n");
    if (o.svg) {
      io::write_file_atomic(c.out_dir / ("sim_" + run.name + "_displacement.svg"),
                            io::time_response_svg(run.name + ": chassis displacement", run.open, run.closed, false));
      io::write_file_atomic(c.out_dir / ("sim_" + run.name + "_acceleration.svg"),
                            io::time_response_svg(run.name + ": chassis acceleration", run.open, run.closed, true));
    }
    std::cout << run.name << ": peak open=" << run.open_metrics.peak_disp << " closed=" << run.closed_metrics.peak_disp
              << " rms open=" << run.open_metrics.rms_disp << " closed=" << run.closed_metrics.rms_disp << "\n";
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  const auto c = load_config(o);
  const auto design = load_design(o, c);
  const auto result = pipeline::run_verify(c, design, c.out_dir);
  for (const auto& check : result.checks) std::cout << (check.pass ? "PASS " : "FAIL ") << check.id << "\n";
  std::cout << "report: " << (c.out_dir / "report.json").string() << "\n";
  return result.pass ? kOk : kSpecFailure;
}

api::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Options& o) {
  api::Service service;
  if (!o.save.empty() && fs::exists(o.save)) service.load(o.save);
  api::HttpServer server(service);
  const int port = server.bind(o.host, o.port);
  if (port < 0) {
    spdlog::error("cannot bind {}:{}", o.host, o.port);
    return kUsage;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << o.host << ":" << port << std::endl;
  server.listen_after_bind();
  g_server = nullptr;
  if (!o.save.empty()) service.save(o.save);
  return kOk;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("qft");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("QFT_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"QFT design workbench for an active pneumatic suspension"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "run configuration JSON")->check(CLI::ExistingFile);
    sub->add_option("--levels", o.levels, "samples per uncertain parameter")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "random seed")->each([&](const std::string&) { o.seed_set = true; });
    sub->add_option("--freqs", o.freqs, "design frequencies, comma separated (rad/s)")->delimiter(',');
  };

  auto* plant = app.add_subcommand("plant", "dump the nominal state-space model and transfer functions");
  common(plant);
  auto* tmpl = app.add_subcommand("template", "compute plant templates and write templates.csv");
  common(tmpl);
  tmpl->add_flag("--svg", o.svg, "also write a Nichols plot");
  auto* bnd = app.add_subcommand("bounds", "compute QFT bounds and write bounds.csv");
  common(bnd);
  bnd->add_flag("--svg", o.svg, "also write a Nichols plot");
  auto* shape = app.add_subcommand("shape", "compose a controller and check it against the specs");
  common(shape);
  shape->add_option("--controller", o.controller, "controller JSON")->check(CLI::ExistingFile);
  auto* sim = app.add_subcommand("simulate", "run road scenarios open and closed loop");
  common(sim);
  sim->add_option("--controller", o.controller, "controller JSON")->check(CLI::ExistingFile);
  sim->add_flag("--svg", o.svg, "also write time-response plots");
  auto* verify = app.add_subcommand("verify", "run the reproduction checks and write report.json");
  common(verify);
  verify->add_option("--controller", o.controller, "controller JSON")->check(CLI::ExistingFile);
  auto* serve = app.add_subcommand("serve", "start the HTTP service");
  serve->add_option("--host", o.host, "bind address");
  serve->add_option("--port", o.port, "port, 0 for any")->check(CLI::Range(0, 65535));
  serve->add_option("--save", o.save, "session export file, loaded at start and written on shutdown");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (*plant) return cmd_plant(o);
    if (*tmpl) return cmd_template(o);
    if (*bnd) return cmd_bounds(o);
    if (*shape) return cmd_shape(o);
    if (*sim) return cmd_simulate(o);
    if (*verify) return cmd_verify(o);
    if (*serve) return cmd_serve(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const io::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSpecFailure;
  }
  return kUsage;
}
