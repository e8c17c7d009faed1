#include "qft/io/config.hpp"

#include <fstream>
#include <sstream>

namespace qft::io {

namespace fs = std::filesystem;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double get_number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? get_number(j, key, where) : fallback;
}

}  // namespace

std::vector<road::RoadProfile> default_scenarios(std::uint64_t seed) {
  road::WhiteNoise noise;
  noise.seed = seed;
  return {road::TwoBumps{}, road::Impulse{}, noise};
}

suspension::UncertaintySet parse_plant_params(const json& j) {
  if (!j.is_object()) throw ConfigError("plant: expected an object");
  suspension::UncertaintySet u;
  auto& n = u.nominal;
  if (j.contains("nominal")) {
    const auto& s = j.at("nominal");
    n.m_a = get_number_or(s, "m_a", n.m_a, "plant.nominal");
    n.m_t = get_number_or(s, "m_t", n.m_t, "plant.nominal");
    n.C_a = get_number_or(s, "C_a", n.C_a, "plant.nominal");
    n.C_t = get_number_or(s, "C_t", n.C_t, "plant.nominal");
    n.K_t = get_number_or(s, "K_t", n.K_t, "plant.nominal");
  }
  if (j.contains("half_ranges")) {
    const auto& s = j.at("half_ranges");
    auto& h = u.half_ranges;
    h.m_a = get_number_or(s, "m_a", h.m_a, "plant.half_ranges");
    h.m_t = get_number_or(s, "m_t", h.m_t, "plant.half_ranges");
    h.C_a = get_number_or(s, "C_a", h.C_a, "plant.half_ranges");
    h.C_t = get_number_or(s, "C_t", h.C_t, "plant.half_ranges");
    h.K_t = get_number_or(s, "K_t", h.K_t, "plant.half_ranges");
  }
  if (j.contains("fixed")) {
    const auto& s = j.at("fixed");
    n.Q1 = get_number_or(s, "Q1", n.Q1, "plant.fixed");
    n.Q2 = get_number_or(s, "Q2", n.Q2, "plant.fixed");
    n.P1 = get_number_or(s, "P1", n.P1, "plant.fixed");
    n.P2 = get_number_or(s, "P2", n.P2, "plant.fixed");
    n.S1 = get_number_or(s, "S1", n.S1, "plant.fixed");
    n.S2 = get_number_or(s, "S2", n.S2, "plant.fixed");
    n.S3 = get_number_or(s, "S3", n.S3, "plant.fixed");
  }
  try {
    u.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("plant: ") + e.what());
  }
  return u;
}

json plant_params_to_json(const suspension::UncertaintySet& u) {
  const auto& n = u.nominal;
  const auto& h = u.half_ranges;
  return {
      {"nominal", {{"m_a", n.m_a}, {"m_t", n.m_t}, {"C_a", n.C_a}, {"C_t", n.C_t}, {"K_t", n.K_t}}},
      {"half_ranges", {{"m_a", h.m_a}, {"m_t", h.m_t}, {"C_a", h.C_a}, {"C_t", h.C_t}, {"K_t", h.K_t}}},
      {"fixed", {{"Q1", n.Q1}, {"Q2", n.Q2}, {"P1", n.P1}, {"P2", n.P2}, {"S1", n.S1}, {"S2", n.S2}, {"S3", n.S3}}},
  };
}

road::RoadProfile parse_road_profile(const json& j, std::uint64_t default_seed) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError("scenario: expected an object with a string 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  const std::string where = "scenario '" + kind + "'";
  if (kind == "two_bumps") {
    road::TwoBumps b;
    b.height_m = get_number_or(j, "height_m", b.height_m, where);
    b.width_s = get_number_or(j, "width_s", b.width_s, where);
    b.t1_s = get_number_or(j, "t1_s", b.t1_s, where);
    b.t2_s = get_number_or(j, "t2_s", b.t2_s, where);
    return b;
  }
  if (kind == "impulse") {
    road::Impulse i;
    i.height_m = get_number_or(j, "height_m", i.height_m, where);
    i.width_s = get_number_or(j, "width_s", i.width_s, where);
    i.start_s = get_number_or(j, "start_s", i.start_s, where);
    return i;
  }
  if (kind == "white_noise") {
    road::WhiteNoise w;
    w.std_m = get_number_or(j, "std_m", w.std_m, where);
    w.hold_dt_s = get_number_or(j, "hold_dt_s", w.hold_dt_s, where);
    w.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed;
    return w;
  }
  if (kind == "step") {
    road::Step s;
    s.height_m = get_number_or(j, "height_m", s.height_m, where);
    s.start_s = get_number_or(j, "start_s", s.start_s, where);
    return s;
  }
  if (kind == "custom") {
    if (!j.contains("samples") || !j.at("samples").is_array()) throw ConfigError(where + ": missing 'samples' array");
    return road::Custom{j.at("samples").get<std::vector<double>>()};
  }
  throw ConfigError("scenario: unknown kind '" + kind + "'");
}

json road_profile_to_json(const road::RoadProfile& p) {
  return std::visit(overloaded{
                        [](const road::TwoBumps& b) {
                          return json{{"kind", "two_bumps"}, {"height_m", b.height_m}, {"width_s", b.width_s},
                                      {"t1_s", b.t1_s}, {"t2_s", b.t2_s}};
                        },
                        [](const road::Impulse& i) {
                          return json{{"kind", "impulse"}, {"height_m", i.height_m}, {"width_s", i.width_s},
                                      {"start_s", i.start_s}};
                        },
                        [](const road::WhiteNoise& w) {
                          return json{{"kind", "white_noise"}, {"std_m", w.std_m}, {"seed", w.seed},
                                      {"hold_dt_s", w.hold_dt_s}};
                        },
                        [](const road::Step& s) {
                          return json{{"kind", "step"}, {"height_m", s.height_m}, {"start_s", s.start_s}};
                        },
                        [](const road::Custom& c) { return json{{"kind", "custom"}, {"samples", c.samples}}; },
                    },
                    p);
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig c;
  if (j.contains("plant") && j.contains("plant_file")) throw ConfigError("config: give either 'plant' or 'plant_file', not both");
  if (j.contains("plant")) {
    c.plant = parse_plant_params(j.at("plant"));
  } else if (j.contains("plant_file")) {
    c.plant = parse_plant_params(read_json_file(base_dir / j.at("plant_file").get<std::string>()));
  }

  if (j.contains("spec")) {
    const auto& s = j.at("spec");
    try {
      c.tracking = specs::TrackingSpec::make(get_number_or(s, "w_st", 1.2, "spec"), get_number_or(s, "overshoot_pct", 5.0, "spec"),
                                             get_number_or(s, "settle_s", 3.0, "spec"), get_number_or(s, "rise_s", 1.7, "spec"));
      c.disturbance = specs::DisturbanceSpec::make(get_number_or(s, "w_sd", 0.4, "spec"));
      if (s.contains("frequency_grid")) c.grid = specs::FrequencyGrid(s.at("frequency_grid").get<std::vector<double>>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("spec: ") + e.what());
    } catch (const json::exception& e) {
      throw ConfigError(std::string("spec: ") + e.what());
    }
  }
  c.phase_step_deg = get_number_or(j, "phase_step_deg", c.phase_step_deg, "config");
  if (!(c.phase_step_deg > 0 && c.phase_step_deg <= 90)) throw ConfigError("config: phase_step_deg must be in (0, 90]");
  if (j.contains("levels")) {
    if (!j.at("levels").is_number_integer() || j.at("levels").get<int>() < 1) throw ConfigError("config: levels must be an integer >= 1");
    c.levels = j.at("levels").get<int>();
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("controller")) c.controller_file = base_dir / j.at("controller").get<std::string>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    c.simulation.dt = get_number_or(s, "dt", c.simulation.dt, "simulation");
    c.simulation.horizon = get_number_or(s, "horizon", c.simulation.horizon, "simulation");
    if (!(c.simulation.dt > 0) || !(c.simulation.horizon > 0)) throw ConfigError("simulation: dt and horizon must be positive");
  }
  if (j.contains("scenarios")) {
    if (!j.at("scenarios").is_array()) throw ConfigError("config: scenarios must be an array");
    for (const auto& s : j.at("scenarios")) c.scenarios.push_back(parse_road_profile(s, c.seed));
  } else {
    c.scenarios = default_scenarios(c.seed);
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path());
}

json run_config_to_json(const RunConfig& c) {
  json scenarios = json::array();
  for (const auto& s : c.scenarios) scenarios.push_back(road_profile_to_json(s));
  json j{
      {"plant", plant_params_to_json(c.plant)},
      {"spec",
       {{"w_st", c.tracking.W_st},
        {"w_sd", c.disturbance.W_sd},
        {"overshoot_pct", c.tracking.overshoot_pct},
        {"settle_s", c.tracking.settle_time_s},
        {"rise_s", c.tracking.rise_time_s},
        {"frequency_grid", c.grid.values()}}},
      {"phase_step_deg", c.phase_step_deg},
      {"levels", c.levels},
      {"seed", c.seed},
      {"simulation", {{"dt", c.simulation.dt}, {"horizon", c.simulation.horizon}}},
      {"scenarios", scenarios},
  };
  return j;
}

shaping::ControllerDesign parse_controller(const json& j) {
  const json* list = &j;
  if (j.is_object() && j.contains("elements")) list = &j.at("elements");
  if (!list->is_array()) throw ConfigError("controller: expected a list of {kind, params} elements");
  shaping::ControllerDesign d;
  std::size_t idx = 0;
  for (const auto& e : *list) {
    const std::string where = "controller element " + std::to_string(idx++);
    if (!e.is_object() || !e.contains("kind") || !e.at("kind").is_string()) throw ConfigError(where + ": missing 'kind'");
    const auto kind = e.at("kind").get<std::string>();
    const json params = e.contains("params") ? e.at("params") : json::object();
    shaping::ControllerElement el;
    if (kind == "gain") {
      el = shaping::Gain{get_number(params, "k", where)};
    } else if (kind == "real_pole") {
      el = shaping::RealPole{get_number(params, "a", where)};
    } else if (kind == "real_zero") {
      el = shaping::RealZero{get_number(params, "a", where)};
    } else if (kind == "complex_pole_pair") {
      el = shaping::ComplexPolePair{get_number(params, "re", where), get_number(params, "im", where)};
    } else if (kind == "complex_zero_pair") {
      el = shaping::ComplexZeroPair{get_number(params, "re", where), get_number(params, "im", where)};
    } else if (kind == "integrator") {
      el = shaping::Integrator{static_cast<int>(get_number_or(params, "order", 1, where))};
    } else {
      throw ConfigError(where + ": unknown kind '" + kind + "'");
    }
    try {
      shaping::validate(el);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
    d.elements.push_back(el);
  }
  return d;
}

json controller_to_json(const shaping::ControllerDesign& d) {
  json out = json::array();
  for (const auto& e : d.elements) {
    json params = std::visit(overloaded{
                                 [](const shaping::Gain& g) { return json{{"k", g.k}}; },
                                 [](const shaping::RealPole& p) { return json{{"a", p.a}}; },
                                 [](const shaping::RealZero& z) { return json{{"a", z.a}}; },
                                 [](const shaping::ComplexPolePair& c) { return json{{"re", c.re}, {"im", c.im}}; },
                                 [](const shaping::ComplexZeroPair& c) { return json{{"re", c.re}, {"im", c.im}}; },
                                 [](const shaping::Integrator& i) { return json{{"order", i.order}}; },
                             },
                             e);
    out.push_back({{"kind", shaping::kind_name(e)}, {"params", params}});
  }
  return out;
}

shaping::ControllerDesign load_controller(const fs::path& path) { return parse_controller(read_json_file(path)); }

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace qft::io
