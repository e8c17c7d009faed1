#include "qft/api/service.hpp"

#include <cmath>
#include <fstream>

#include <spdlog/spdlog.h>

#include "qft/io/serialize.hpp"

namespace qft::api {

namespace {

io::RunConfig config_from_body(const json& body) {
  if (!body.is_object()) throw ApiError(400, "session config must be a JSON object");
  for (const char* key : {"plant_file", "controller"}) {
    if (body.contains(key)) throw ApiError(400, std::string("config field '") + key + "' refers to a file; send it inline");
  }
  try {
    return io::parse_run_config(body, ".");
  } catch (const io::ConfigError& e) {
    throw ApiError(400, e.what());
  } catch (const std::invalid_argument& e) {
    throw ApiError(400, e.what());
  } catch (const specs::SpecConflictError& e) {
    throw ApiError(400, e.what());
  } catch (const json::exception& e) {
    throw ApiError(400, std::string("config: ") + e.what());
  }
}

shaping::ControllerDesign design_from_body(const json& body) {
  try {
    return io::parse_controller(body);
  } catch (const io::ConfigError& e) {
    throw ApiError(400, e.what());
  } catch (const json::exception& e) {
    throw ApiError(400, std::string("controller: ") + e.what());
  }
}

pipeline::Workbench build(const io::RunConfig& config) {
  try {
    return pipeline::build_workbench(config);
  } catch (const std::invalid_argument& e) {
    throw ApiError(400, e.what());
  }
}

const suspension::PlantInstance& nominal_of(const Session& s) {
  return s.workbench.plants[suspension::nominal_index(s.workbench.plants)];
}

json evaluation(const Session& s, const shaping::ControllerDesign& design) {
  const auto G = shaping::compose_controller(design);
  const auto& wb = s.workbench;
  const auto report = shaping::validate_design(design, wb.plants, wb.config.tracking, wb.config.disturbance, wb.config.grid);
  json markers = json::array();
  for (const auto& v : report.frequencies) {
    markers.push_back({{"omega", v.omega}, {"phase_deg", v.nominal_loop.phase_deg}, {"mag_db", io::number(v.nominal_loop.mag_db)}});
  }
  return {{"session_id", s.id},
          {"revision", s.revision},
          {"controller", {{"elements", io::controller_to_json(design)}, {"tf", io::tf_to_json(G)}}},
          {"loop", loop_samples(G, nominal_of(s), 1e-2, 1e3, 500)},
          {"markers", markers},
          {"report", io::loop_report_to_json(report)}};
}

}  // namespace

json loop_samples(const lti::TransferFunctiond& controller, const suspension::PlantInstance& nominal, double w_lo, double w_hi,
                  int points) {
  json out = json::array();
  const double a = std::log10(w_lo), b = std::log10(w_hi);
  for (int k = 0; k < points; ++k) {
    const double w = std::pow(10.0, a + (b - a) * k / (points - 1));
    const auto z = lti::freq_eval(controller, w) * lti::freq_eval(nominal.Gu, w);
    if (z == std::complex<double>(0.0, 0.0)) {
      out.push_back({{"omega", w}, {"phase_deg", 0.0}, {"mag_db", "-inf"}});
      continue;
    }
    const auto np = lti::to_nichols(z);
    out.push_back({{"omega", w}, {"phase_deg", np.phase_deg}, {"mag_db", np.mag_db}});
  }
  return out;
}

std::shared_ptr<Session> Service::add(pipeline::Workbench wb, std::optional<shaping::ControllerDesign> design,
                                      std::uint64_t revision, std::optional<std::string> id) {
  auto s = std::make_shared<Session>();
  s->workbench = std::move(wb);
  s->design = std::move(design);
  s->revision = revision;
  std::unique_lock lock(sessions_mutex_);
  if (id) {
    if (sessions_.count(*id)) throw ApiError(409, "duplicate session id " + *id);
    s->id = *id;
  } else {
    do {
      s->id = "s" + std::to_string(next_id_++);
    } while (sessions_.count(s->id));
  }
  sessions_.emplace(s->id, s);
  return s;
}

std::shared_ptr<Session> Service::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "no session " + id);
  return it->second;
}

std::size_t Service::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

json Service::create_session(const json& body) {
  const auto config = config_from_body(body);
  auto s = add(build(config), std::nullopt, 0, std::nullopt);
  spdlog::info("session {} created: {} plants, {} frequencies", s->id, s->workbench.plants.size(), s->workbench.bounds.size());
  return {{"session_id", s->id},
          {"revision", s->revision},
          {"plants", s->workbench.plants.size()},
          {"frequencies", s->workbench.config.grid.values()},
          {"phases", s->workbench.phases.size()},
          {"config", io::run_config_to_json(s->workbench.config)}};
}

json Service::templates(const std::string& id) const {
  const auto s = find(id);
  json out = json::array();
  for (const auto& fb : s->workbench.bounds) out.push_back(io::template_to_json(fb.tmpl));
  return {{"session_id", s->id}, {"templates", out}};
}

json Service::bounds(const std::string& id) const {
  const auto s = find(id);
  json out = json::array();
  for (const auto& fb : s->workbench.bounds) {
    out.push_back({{"omega", fb.tmpl.omega},
                   {"tracking", io::bound_curve_to_json(fb.tracking)},
                   {"disturbance", io::bound_curve_to_json(fb.disturbance)},
                   {"combined", io::bound_curve_to_json(fb.combined)},
                   {"nominal_loop_bound", io::loop_bound_to_json(bounds::nominal_loop_bound(fb.combined, fb.tmpl.nominal()))}});
  }
  return {{"session_id", s->id},
          {"display_min_db", bounds::kDisplayMinDb},
          {"display_max_db", bounds::kDisplayMaxDb},
          {"bounds", out}};
}

json Service::evaluate_controller(const std::string& id, const json& body) {
  const auto s = find(id);
  const auto design = design_from_body(body);
  const auto G = shaping::compose_controller(design);
  if (!G.is_proper()) {
    throw ApiError(400, "controller is improper (relative degree " + std::to_string(G.relative_degree()) + ")");
  }
  std::lock_guard lock(s->mutex);
  if (body.is_object() && body.contains("base_revision")) {
    const auto base = body.at("base_revision").get<std::uint64_t>();
    if (base != s->revision) {
      throw ApiError(409, "stale revision " + std::to_string(base) + ", current is " + std::to_string(s->revision));
    }
  }
  s->design = design;
  ++s->revision;
  return evaluation(*s, design);
}

json Service::simulate(const std::string& id, const json& body) const {
  const auto s = find(id);
  std::optional<shaping::ControllerDesign> design;
  std::uint64_t revision = 0;
  {
    std::lock_guard lock(s->mutex);
    design = s->design;
    revision = s->revision;
  }
  if (!design) throw ApiError(409, "session has no controller; PUT /sessions/" + id + "/controller first");
  if (!body.is_null() && !body.is_object()) throw ApiError(400, "simulate body must be an object");
  const json b = body.is_null() ? json::object() : body;
  io::SimulationSettings sim = s->workbench.config.simulation;
  road::RoadProfile profile = road::TwoBumps{};
  std::size_t stride = 1;
  try {
    if (b.contains("scenario")) profile = io::parse_road_profile(b.at("scenario"), s->workbench.config.seed);
    if (b.contains("dt")) sim.dt = b.at("dt").get<double>();
    if (b.contains("horizon")) sim.horizon = b.at("horizon").get<double>();
    if (b.contains("stride")) stride = b.at("stride").get<std::size_t>();
  } catch (const io::ConfigError& e) {
    throw ApiError(400, e.what());
  } catch (const json::exception& e) {
    throw ApiError(400, std::string("simulate: ") + e.what());
  }
  if (!(sim.dt > 0) || !(sim.horizon > 0) || sim.horizon / sim.dt > 2e6) {
    throw ApiError(400, "simulate: need dt > 0, horizon > 0 and at most 2e6 steps");
  }
  try {
    const auto run = pipeline::run_scenario(nominal_of(*s), *design, profile, sim);
    return {{"session_id", s->id},
            {"revision", revision},
            {"scenario", io::road_profile_to_json(profile)},
            {"open_loop", io::sim_result_to_json(run.open, stride)},
            {"closed_loop", io::sim_result_to_json(run.closed, stride)}};
  } catch (const road::UnstableLoopError& e) {
    throw ApiError(422, e.what());
  } catch (const std::invalid_argument& e) {
    throw ApiError(400, e.what());
  }
}

json Service::report(const std::string& id) const {
  const auto s = find(id);
  std::optional<shaping::ControllerDesign> design;
  std::uint64_t revision = 0;
  {
    std::lock_guard lock(s->mutex);
    design = s->design;
    revision = s->revision;
  }
  const auto& wb = s->workbench;
  const auto& nominal = nominal_of(*s);
  json out = {{"session_id", s->id},
              {"revision", revision},
              {"plants", wb.plants.size()},
              {"nominal_plant", io::plant_instance_to_json(nominal)},
              {"nominal_b1", suspension::coefficient(nominal, suspension::CoeffFamily::kDen, 1)}};
  json spread = json::array();
  for (const auto& fb : wb.bounds) {
    spread.push_back({{"omega", fb.tmpl.omega}, {"template_spread_db", bounds::template_spread_db(fb.tmpl)},
                      {"empty_phases", fb.combined.has_empty_phase()}});
  }
  out["templates"] = spread;
  try {
    const auto env = specs::synthesize_envelopes(wb.config.tracking);
    out["envelopes"] = io::envelopes_to_json(env);
    out["tracking_spread_advisory"] = io::spread_report_to_json(bounds::tracking_spread_report(wb.bounds, env));
  } catch (const specs::SpecConflictError& e) {
    out["envelopes"] = {{"error", e.what()}};
  }
  if (design) {
    const auto r = shaping::validate_design(*design, wb.plants, wb.config.tracking, wb.config.disturbance, wb.config.grid);
    out["controller"] = io::controller_to_json(*design);
    out["loop_report"] = io::loop_report_to_json(r);
  } else {
    out["controller"] = nullptr;
    out["loop_report"] = nullptr;
  }
  return out;
}

json Service::export_sessions() const {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::shared_lock lock(sessions_mutex_);
    for (const auto& [id, s] : sessions_) all.push_back(s);
  }
  json out = json::array();
  for (const auto& s : all) {
    std::lock_guard lock(s->mutex);
    out.push_back({{"id", s->id},
                   {"revision", s->revision},
                   {"config", io::run_config_to_json(s->workbench.config)},
                   {"controller", s->design ? io::controller_to_json(*s->design) : json(nullptr)}});
  }
  return {{"sessions", out}};
}

void Service::import_sessions(const json& doc) {
  if (!doc.is_object() || !doc.contains("sessions") || !doc.at("sessions").is_array()) {
    throw ApiError(400, "session export must hold a 'sessions' array");
  }
  for (const auto& e : doc.at("sessions")) {
    const auto config = config_from_body(e.at("config"));
    std::optional<shaping::ControllerDesign> design;
    if (e.contains("controller") && !e.at("controller").is_null()) design = design_from_body(e.at("controller"));
    add(build(config), design, e.value("revision", std::uint64_t{0}), e.at("id").get<std::string>());
  }
}

void Service::save(const std::filesystem::path& path) const { io::write_file_atomic(path, export_sessions().dump(2) + "\n"); }

void Service::load(const std::filesystem::path& path) { import_sessions(io::read_json_file(path)); }

}  // namespace qft::api
