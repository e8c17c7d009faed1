#include "qft/pipeline.hpp"

#include <cmath>
#include <random>

#include <spdlog/spdlog.h>

#include "qft/io/csv.hpp"
#include "qft/io/serialize.hpp"
#include "qft/io/svg.hpp"

namespace qft::pipeline {

namespace fs = std::filesystem;

Workbench build_workbench(const io::RunConfig& config) {
  Workbench wb;
  wb.config = config;
  wb.plants = suspension::sample_plants(config.plant, config.levels);
  wb.phases = config.phase_grid();
  wb.bounds = bounds::compute_all_bounds(wb.plants, config.grid, config.tracking, config.disturbance, wb.phases);
  spdlog::debug("workbench: {} plants, {} frequencies, {} phases", wb.plants.size(), wb.bounds.size(), wb.phases.size());
  return wb;
}

ScenarioRun run_scenario(const suspension::PlantInstance& plant, const shaping::ControllerDesign& design,
                         const road::RoadProfile& profile, const io::SimulationSettings& sim) {
  ScenarioRun run;
  run.name = road::profile_name(profile);
  run.road = road::generate_road(profile, sim.dt, sim.horizon);
  run.open = road::simulate_open_loop(plant, run.road, sim.dt, sim.horizon);
  run.closed = road::simulate_closed_loop(plant, design, run.road, sim.dt, sim.horizon);
  run.open_metrics = road::response_metrics(run.open);
  run.closed_metrics = road::response_metrics(run.closed);
  return run;
}

json scenario_metrics_json(const ScenarioRun& run) {
  return {{"scenario", run.name},
          {"open_loop", io::response_metrics_to_json(run.open_metrics)},
          {"closed_loop", io::response_metrics_to_json(run.closed_metrics)}};
}

double observed_order(double coarse_diff, double fine_diff) { return std::log2(coarse_diff / fine_diff); }

namespace {

double rel_err(double value, double ref) { return std::abs(value - ref) / std::abs(ref); }

Check check_nominal_constants(const suspension::PlantInstance& nominal) {
  Check c{"nominal_constants", "b5/a5 within 0.1% of 6.7587e6, b1 in [2414, 2428], c3/c5 within 1.5% of 3.52e5/3.25e9", false, {}};
  using suspension::CoeffFamily;
  const double b1 = suspension::coefficient(nominal, CoeffFamily::kDen, 1);
  const double b5 = suspension::coefficient(nominal, CoeffFamily::kDen, 5);
  const double a5 = suspension::coefficient(nominal, CoeffFamily::kGd, 5);
  const double c3 = suspension::coefficient(nominal, CoeffFamily::kGu, 3);
  const double c5 = suspension::coefficient(nominal, CoeffFamily::kGu, 5);
  const Eigen::MatrixXd minus_a = -nominal.ss.A;
  const double det = minus_a.determinant();
  const double trace = minus_a.trace();
  const double b5_ref = 6.7587e6;
  c.details = {{"b1", b1}, {"b1_trace_oracle", trace}, {"b5", b5}, {"b5_det_oracle", det}, {"a5", a5}, {"c3", c3}, {"c5", c5},
               {"b5_rel_err", rel_err(b5, b5_ref)}, {"a5_rel_err", rel_err(a5, b5_ref)},
               {"c3_rel_err", rel_err(c3, 3.52e5)}, {"c5_rel_err", rel_err(c5, 3.25e9)}};
  c.pass = rel_err(b5, b5_ref) <= 1e-3 && rel_err(a5, b5_ref) <= 1e-3 && b1 >= 2414 && b1 <= 2428 &&
           rel_err(c3, 3.52e5) <= 0.015 && rel_err(c5, 3.25e9) <= 0.015 && rel_err(b5, det) <= 1e-6 &&
           rel_err(b1, trace) <= 1e-12;
  return c;
}

Check check_noise_floor(const suspension::PlantInstance& nominal) {
  Check c{"noise_floor", "a1, a2, c1, c2 below 1e-6 of their polynomial's largest coefficient", true, json::object()};
  using suspension::CoeffFamily;
  const double gd_scale = nominal.Gd.num().max_abs_coeff() / nominal.Gd.den().leading();
  const double gu_scale = nominal.Gu.num().max_abs_coeff() / nominal.Gu.den().leading();
  const std::pair<const char*, double> items[] = {
      {"a1", suspension::coefficient(nominal, CoeffFamily::kGd, 1) / gd_scale},
      {"a2", suspension::coefficient(nominal, CoeffFamily::kGd, 2) / gd_scale},
      {"c1", suspension::coefficient(nominal, CoeffFamily::kGu, 1) / gu_scale},
      {"c2", suspension::coefficient(nominal, CoeffFamily::kGu, 2) / gu_scale},
  };
  for (const auto& [name, rel] : items) {
    c.details[name] = rel;
    if (!(std::abs(rel) < suspension::kNoiseFloor)) c.pass = false;
  }
  return c;
}

Check check_intervals(const suspension::UncertaintySet& set, json& report_out) {
  Check c{"interval_containment", "2^5-corner ranges intersect every published interval; nominal strictly inside; discrepancies flagged", false, {}};
  const auto corners = suspension::sample_plants(set, 2);
  const auto report = suspension::check_published_intervals(corners, suspension::PublishedIntervals::published());
  report_out = io::interval_report_to_json(report);
  bool all_intersect = true;
  bool nominal_ok = true;
  for (const auto& ch : report.checks) {
    all_intersect = all_intersect && ch.range_intersects;
    nominal_ok = nominal_ok && ch.nominal_ok;
  }
  const bool b5_flagged = !report.at("b5").range_within_slack;
  c.details = {{"instances", corners.size()}, {"all_ranges_intersect", all_intersect}, {"nominal_inside", nominal_ok},
               {"discrepancies", report.discrepancies.size()}, {"b5_flagged", b5_flagged}};
  c.pass = report.pass && all_intersect && nominal_ok && b5_flagged;
  return c;
}

Check check_controller() {
  Check c{"controller_reconstruction", "element list with gain 3673 reproduces the printed Gc within 0.1%; printed poles recovered within 0.5%", true, {}};
  const auto G = shaping::compose_controller(shaping::baseline_controller());
  const std::vector<double> num_ref{3673, 7.729e4, 6.233e4};
  const std::vector<double> den_ref{1, 632.9, 2.003e5, 2.662e6, 7.791e6};
  json num_err = json::array();
  json den_err = json::array();
  if (G.num().degree() != 2 || G.den().degree() != 4) c.pass = false;
  for (int i = 0; i <= 2 && c.pass; ++i) {
    const double e = rel_err(G.num().coeffs()(i), num_ref[i]);
    num_err.push_back(e);
    if (e > 1e-3) c.pass = false;
  }
  for (int i = 0; i <= 4 && c.pass; ++i) {
    const double e = rel_err(G.den().coeffs()(i), den_ref[i]);
    den_err.push_back(e);
    if (e > 1e-3) c.pass = false;
  }
  const auto r = lti::roots(lti::Polynomiald(den_ref));
  const std::vector<std::complex<double>> expected{{-4.3, 0}, {-9.45, 0}, {-309.6, 309.7}, {-309.6, -309.7}};
  json root_err = json::array();
  for (const auto& e : expected) {
    double best = bounds::kInf;
    for (const auto& x : r) best = std::min(best, std::abs(x - e) / std::abs(e));
    root_err.push_back(best);
    if (best > 5e-3) c.pass = false;
  }
  c.details = {{"num", G.num().to_vector()}, {"den", G.den().to_vector()}, {"num_rel_err", num_err},
               {"den_rel_err", den_err}, {"root_rel_err", root_err}};
  return c;
}

Check check_bound_solver(std::uint64_t seed) {
  Check c{"bound_solver_vs_oracle", "1000 random cases per spec agree with a dense gain-grid oracle away from endpoints; hand cases exact", true, {}};
  // Hand-derived cases.
  const auto t = bounds::tracking_feasible({1.0, 0.0}, 1.2, 180.0);
  const auto d180 = bounds::disturbance_feasible({1.0, 0.0}, {1.0, 0.0}, 0.4, 180.0);
  const auto d0 = bounds::disturbance_feasible({1.0, 0.0}, {1.0, 0.0}, 0.4, 0.0);
  const bool hand = t.intervals().size() == 2 && std::abs(t.intervals()[0].hi - 6.0 / 11.0) <= 1e-9 &&
                    std::abs(t.intervals()[1].lo - 6.0) <= 1e-9 && d180.intervals().size() == 1 &&
                    std::abs(d180.intervals()[0].lo - 3.5) <= 1e-9 && d0.intervals().size() == 1 &&
                    std::abs(d0.intervals()[0].lo - 1.5) <= 1e-9;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_mag(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(-360.0, 0.0);
  constexpr double kStep = 1e-3;
  constexpr int kGrid = 20000;
  std::size_t disagreements = 0;
  std::size_t checked = 0;
  for (int kind = 0; kind < 2; ++kind) {
    for (int n = 0; n < 1000; ++n) {
      bounds::Template tmpl;
      tmpl.gu = {std::polar(std::pow(10.0, log_mag(rng)), phase(rng) * M_PI / 180.0)};
      tmpl.gd = {std::polar(std::pow(10.0, log_mag(rng)), phase(rng) * M_PI / 180.0)};
      const double phi = phase(rng);
      const double W = kind == 0 ? 1.2 : 0.4;
      const auto set = kind == 0 ? bounds::tracking_feasible(tmpl.gu[0], W, phi)
                                 : bounds::disturbance_feasible(tmpl.gd[0], tmpl.gu[0], W, phi);
      const auto spec_kind = kind == 0 ? bounds::SpecKind::kTracking : bounds::SpecKind::kDisturbance;
      for (int k = 0; k <= kGrid; ++k) {
        const double g = k * kStep;
        ++checked;
        if (set.contains(g) != bounds::feasible_oracle(tmpl, spec_kind, W, phi, g) && set.distance_to_endpoint(g) > kStep) {
          ++disagreements;
        }
      }
    }
  }
  c.pass = hand && disagreements == 0;
  c.details = {{"hand_cases_exact", hand}, {"grid_points_checked", checked}, {"disagreements_off_endpoint", disagreements}};
  return c;
}

Check check_dc_design(const io::RunConfig& config, const shaping::ControllerDesign& design) {
  Check c{"design_at_dc", "|T(j1e-4)| = 0.794 +- 0.005, |Gd/(1+GuGc)|(j1e-4) = 0.206 +- 0.005, nominal and all 243 closed loops stable", false, {}};
  auto plants = suspension::sample_plants(config.plant, 3);
  const auto report = shaping::validate_design(design, plants, config.tracking, config.disturbance,
                                               specs::FrequencyGrid({1e-4}));
  const auto& v = report.frequencies.front();
  c.details = {{"T_dc", v.worst_tracking}, {"S_dc", v.worst_disturbance}, {"instances", plants.size()},
               {"nominal_stable", report.nominal_stable}, {"unstable_plants", report.unstable_plants}};
  // Nominal values, not worst-case over the set.
  const auto G = shaping::compose_controller(design);
  const auto& p0 = plants[suspension::nominal_index(plants)];
  const auto T = lti::closed_loop_tracking(p0.Gu, G);
  const auto S = lti::closed_loop_disturbance(p0.Gd, p0.Gu, G);
  const double t_mag = std::abs(lti::freq_eval(T, 1e-4));
  const double s_mag = std::abs(lti::freq_eval(S, 1e-4));
  c.details["T_nominal"] = t_mag;
  c.details["S_nominal"] = s_mag;
  c.pass = std::abs(t_mag - 0.794) <= 0.005 && t_mag <= config.tracking.W_st && std::abs(s_mag - 0.206) <= 0.005 &&
           s_mag <= config.disturbance.W_sd && report.nominal_stable && report.robust_stable && plants.size() == 243;
  return c;
}

Check check_simulation(const suspension::PlantInstance& nominal, const shaping::ControllerDesign& design,
                       const ScenarioRun& bumps) {
  Check c{"simulation_properties", "closed-loop bump peak/RMS below open loop; step steady states; RK4 order >= 3.8; linearity", true, {}};
  const bool dominance = bumps.closed_metrics.peak_disp < bumps.open_metrics.peak_disp &&
                         bumps.closed_metrics.rms_disp < bumps.open_metrics.rms_disp;

  // Sustained 5 cm step.
  const double dt = 1e-3, T_long = 60.0;
  const auto step = road::generate_road(road::Step{0.05, 0.0}, dt, T_long);
  const double open_ss = road::simulate_open_loop(nominal, step, dt, T_long).x_a.tail(1)(0);
  const double closed_ss = road::simulate_closed_loop(nominal, design, step, dt, T_long).x_a.tail(1)(0);
  const bool steady = std::abs(open_ss - 0.05) <= 5e-4 && std::abs(closed_ss - 0.0103) <= 5e-4;

  // Order on x' = -x.
  lti::StateSpaced decay;
  decay.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
  decay.B_u = decay.B_d = Eigen::VectorXd::Zero(1);
  decay.C = Eigen::RowVectorXd::Ones(1);
  const auto decay_error = [&](double h) {
    const auto n = static_cast<std::size_t>(lti::step_count(h, 1.0) + 1);
    const std::vector<double> zeros(n, 0.0);
    const auto x = lti::simulate_rk4<double>(decay, zeros, zeros, h, 1.0, Eigen::VectorXd::Ones(1));
    return std::abs(x(0, x.cols() - 1) - std::exp(-1.0));
  };
  const double decay_order = observed_order(decay_error(0.1), decay_error(0.05));

  // Halving dt on the closed-loop bump response.
  const auto bump_run = [&](double h) {
    const auto road = road::generate_road(road::TwoBumps{}, h, 10.0);
    return road::simulate_closed_loop(nominal, design, road, h, 10.0).x_a;
  };
  const Eigen::VectorXd y1 = bump_run(1e-3), y2 = bump_run(5e-4), y4 = bump_run(2.5e-4);
  double d12 = 0, d24 = 0;
  for (Eigen::Index k = 0; k < y1.size(); ++k) d12 = std::max(d12, std::abs(y1(k) - y2(2 * k)));
  for (Eigen::Index k = 0; k < y2.size(); ++k) d24 = std::max(d24, std::abs(y2(k) - y4(2 * k)));
  const double bump_order = observed_order(d12, d24);

  // Linearity under road scaling.
  const auto doubled = road::simulate_closed_loop(nominal, design, 2.0 * bumps.road, 1e-3, 10.0);
  const double lin_x = (doubled.x_a - 2.0 * bumps.closed.x_a).cwiseAbs().maxCoeff() / doubled.x_a.cwiseAbs().maxCoeff();
  const double lin_a =
      (doubled.x_a_ddot - 2.0 * bumps.closed.x_a_ddot).cwiseAbs().maxCoeff() / doubled.x_a_ddot.cwiseAbs().maxCoeff();

  c.pass = dominance && steady && decay_order >= 3.8 && bump_order >= 3.8 && lin_x <= 1e-9 && lin_a <= 1e-9;
  c.details = {{"open_peak", bumps.open_metrics.peak_disp}, {"closed_peak", bumps.closed_metrics.peak_disp},
               {"open_rms", bumps.open_metrics.rms_disp}, {"closed_rms", bumps.closed_metrics.rms_disp},
               {"open_step_steady_state", open_ss}, {"closed_step_steady_state", closed_ss},
               {"rk4_order_decay", decay_order}, {"rk4_order_bump", bump_order},
               {"linearity_rel_disp", lin_x}, {"linearity_rel_accel", lin_a}};
  return c;
}

Check check_envelopes(const specs::EnvelopePair& env) {
  Check c{"envelopes", "upper: 5% +- 0.5 pt overshoot, 3.0 s +- 10% settling; lower rise >= 1.7 s; upper >= lower", false, {}};
  const auto up = specs::step_metrics(env.upper, 1e-3, 20.0);
  const auto lo = specs::step_metrics(env.lower, 1e-3, 20.0);
  const Eigen::VectorXd yu = specs::step_response(env.upper, 1e-3, 10.0);
  const Eigen::VectorXd yl = specs::step_response(env.lower, 1e-3, 10.0);
  const double worst_gap = (yl - yu).maxCoeff();
  c.pass = std::abs(up.overshoot_pct - 5.0) <= 0.5 && std::abs(up.settle_2pct_s - 3.0) <= 0.3 && lo.rise_10_90_s >= 1.7 &&
           worst_gap <= 1e-9;
  c.details = {{"upper", io::step_metrics_to_json(up)}, {"lower", io::step_metrics_to_json(lo)},
               {"max_lower_minus_upper", worst_gap}, {"envelopes", io::envelopes_to_json(env)}};
  return c;
}

}  // namespace

VerifyResult run_verify(const io::RunConfig& config, const shaping::ControllerDesign& design, const fs::path& out_dir) {
  VerifyResult result;
  const auto wb = build_workbench(config);
  const auto& nominal = wb.plants[suspension::nominal_index(wb.plants)];
  const auto env = specs::synthesize_envelopes(config.tracking);

  std::vector<ScenarioRun> runs;
  for (const auto& s : config.scenarios) runs.push_back(run_scenario(nominal, design, s, config.simulation));
  ScenarioRun bumps = run_scenario(nominal, design, road::TwoBumps{}, {1e-3, 10.0});

  json interval_json;
  result.checks.push_back(check_nominal_constants(nominal));
  result.checks.push_back(check_noise_floor(nominal));
  result.checks.push_back(check_intervals(config.plant, interval_json));
  result.checks.push_back(check_controller());
  result.checks.push_back(check_bound_solver(config.seed));
  result.checks.push_back(check_dc_design(config, design));
  result.checks.push_back(check_simulation(nominal, design, bumps));
  result.checks.push_back(check_envelopes(env));

  result.pass = std::all_of(result.checks.begin(), result.checks.end(), [](const Check& c) { return c.pass; });
  for (const auto& c : result.checks) spdlog::info("{} {}", c.pass ? "PASS" : "FAIL", c.id);

  const auto loop_report = shaping::validate_design(design, wb.plants, config.tracking, config.disturbance, config.grid);
  std::vector<bounds::SpreadRow> spread = bounds::tracking_spread_report(wb.bounds, env);

  json checks = json::array();
  for (const auto& c : result.checks) checks.push_back({{"id", c.id}, {"description", c.description}, {"pass", c.pass}, {"details", c.details}});
  json scenarios = json::array();
  for (const auto& r : runs) scenarios.push_back(scenario_metrics_json(r));

  const auto G = shaping::compose_controller(design);
  result.report = {
      {"pass", result.pass},
      {"config", io::run_config_to_json(config)},
      {"nominal_b1", suspension::coefficient(nominal, suspension::CoeffFamily::kDen, 1)},
      {"nominal_b5", suspension::coefficient(nominal, suspension::CoeffFamily::kDen, 5)},
      {"nominal_plant", io::plant_instance_to_json(nominal)},
      {"interval_report", interval_json},
      {"controller", {{"elements", io::controller_to_json(design)}, {"tf", io::tf_to_json(G)}}},
      {"loop_report", io::loop_report_to_json(loop_report)},
      {"tracking_spread_advisory", io::spread_report_to_json(spread)},
      {"tracking_delta_db", config.tracking.delta_db},
      {"scenarios", scenarios},
      {"checks", checks},
  };

  std::vector<bounds::BoundCurve> curves;
  std::vector<bounds::Template> templates;
  for (const auto& fb : wb.bounds) {
    curves.push_back(fb.tracking);
    curves.push_back(fb.disturbance);
    curves.push_back(fb.combined);
    templates.push_back(fb.tmpl);
  }
  io::write_file_atomic(out_dir / "report.json", result.report.dump(2) + "\n");
  io::write_file_atomic(out_dir / "bounds.csv", io::write_bounds_csv(curves));
  io::write_file_atomic(out_dir / "templates.csv", io::write_templates_csv(templates));
  std::vector<std::pair<double, double>> loop;
  for (double lw = -2; lw <= 3.0001; lw += 0.01) {
    const double w = std::pow(10.0, lw);
    const auto z = lti::freq_eval(G, w) * lti::freq_eval(nominal.Gu, w);
    const auto np = lti::to_nichols(z);
    loop.emplace_back(np.phase_deg, np.mag_db);
  }
  io::write_file_atomic(out_dir / "nichols.svg", io::nichols_chart_svg(wb.bounds, loop, true));
  for (const auto& r : runs) {
    io::write_file_atomic(out_dir / ("sim_" + r.name + "_open.csv"), io::write_sim_csv(r.open));
    io::write_file_atomic(out_dir / ("sim_" + r.name + "_closed.csv"), io::write_sim_csv(r.closed));
    io::write_file_atomic(out_dir / ("sim_" + r.name + "_metrics.json"), scenario_metrics_json(r).dump(2) + "\n");
    io::write_file_atomic(out_dir / ("sim_" + r.name + "_displacement.svg"),
                          io::time_response_svg(r.name + ": chassis displacement", r.open, r.closed, false));
    io::write_file_atomic(out_dir / ("sim_" + r.name + "_acceleration.svg"),
                          io::time_response_svg(r.name + ": chassis acceleration", r.open, r.closed, true));
  }
  return result;
}

}  // namespace qft::pipeline
