#include "qft/io/serialize.hpp"

#include <cmath>

namespace qft::io {

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json poly_to_json(const lti::Polynomiald& p) { return p.to_vector(); }

json tf_to_json(const lti::TransferFunctiond& tf) { return {{"num", poly_to_json(tf.num())}, {"den", poly_to_json(tf.den())}}; }

json state_space_to_json(const lti::StateSpaced& ss) {
  json A = json::array();
  for (Eigen::Index i = 0; i < ss.A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < ss.A.cols(); ++j) row.push_back(ss.A(i, j));
    A.push_back(row);
  }
  const auto vec = [](const auto& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
  };
  return {{"A", A}, {"B_u", vec(ss.B_u)}, {"B_d", vec(ss.B_d)}, {"C", vec(ss.C)}, {"D_u", ss.D_u}, {"D_d", ss.D_d}};
}

json plant_instance_to_json(const suspension::PlantInstance& p) {
  const auto& q = p.params;
  return {
      {"is_nominal", p.is_nominal},
      {"params", {{"m_a", q.m_a}, {"m_t", q.m_t}, {"C_a", q.C_a}, {"C_t", q.C_t}, {"K_t", q.K_t}}},
      {"state_space", state_space_to_json(p.ss)},
      {"Gu", tf_to_json(p.Gu)},
      {"Gd", tf_to_json(p.Gd)},
  };
}

json interval_report_to_json(const suspension::IntervalReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({
        {"name", c.name},
        {"computed_min", c.computed_min},
        {"computed_max", c.computed_max},
        {"nominal", c.nominal},
        {"published_lo", c.published_lo},
        {"published_hi", c.published_hi},
        {"fixed", c.fixed},
        {"near_zero", c.near_zero},
        {"range_intersects", c.range_intersects},
        {"range_within_slack", c.range_within_slack},
        {"nominal_ok", c.nominal_ok},
        {"nominal_rel_error", c.nominal_rel_error},
        {"note", c.note},
    });
  }
  return {{"pass", r.pass}, {"checks", checks}, {"discrepancies", r.discrepancies}};
}

json template_to_json(const bounds::Template& t) {
  json pts = json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto np = lti::to_nichols(t.gu[i]);
    pts.push_back({{"gu", {t.gu[i].real(), t.gu[i].imag()}},
                   {"gd", {t.gd[i].real(), t.gd[i].imag()}},
                   {"phase_deg", np.phase_deg},
                   {"mag_db", np.mag_db}});
  }
  return {{"omega", t.omega}, {"nominal_index", t.nominal_index}, {"points", pts}};
}

json gain_set_to_json(const bounds::GainSet& s) {
  json out = json::array();
  for (const auto& iv : s.intervals()) {
    out.push_back({{"lo_db", number(iv.lo > 0 ? lti::to_db(iv.lo) : -bounds::kInf)}, {"hi_db", number(lti::to_db(iv.hi))}});
  }
  return out;
}

json bound_curve_to_json(const bounds::BoundCurve& b) {
  json phases = json::array();
  for (std::size_t i = 0; i < b.phases_deg.size(); ++i) {
    phases.push_back({{"phase_deg", b.phases_deg[i]}, {"empty", b.feasible[i].is_empty()}, {"intervals", gain_set_to_json(b.feasible[i])}});
  }
  return {{"omega", b.omega}, {"spec_kind", bounds::to_string(b.kind)}, {"has_empty_phase", b.has_empty_phase()}, {"phases", phases}};
}

json loop_bound_to_json(const bounds::LoopBound& b) {
  json pts = json::array();
  for (const auto& p : b.points) {
    json lo = json::array();
    json hi = json::array();
    json truncated = json::array();
    for (std::size_t i = 0; i < p.lo_db.size(); ++i) {
      lo.push_back(number(p.lo_db[i]));
      hi.push_back(number(p.hi_db[i]));
      truncated.push_back(p.lo_db[i] < bounds::kDisplayMinDb || p.hi_db[i] > bounds::kDisplayMaxDb);
    }
    pts.push_back({{"controller_phase_deg", p.controller_phase_deg},
                   {"loop_phase_deg", p.loop_phase_deg},
                   {"lo_db", lo},
                   {"hi_db", hi},
                   {"display_truncated", truncated}});
  }
  return {{"omega", b.omega}, {"spec_kind", bounds::to_string(b.kind)}, {"points", pts}};
}

json spread_report_to_json(const std::vector<bounds::SpreadRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"omega", r.omega}, {"template_spread_db", r.template_spread_db}, {"allowed_spread_db", r.allowed_spread_db}, {"ok", r.ok}});
  }
  return out;
}

json envelopes_to_json(const specs::EnvelopePair& env) {
  return {{"upper", tf_to_json(env.upper)},
          {"lower", tf_to_json(env.lower)},
          {"zeta", env.zeta},
          {"omega_n", env.omega_n},
          {"lower_pole", env.lower_pole}};
}

json step_metrics_to_json(const specs::StepMetrics& m) {
  return {{"overshoot_pct", m.overshoot_pct}, {"rise_10_90_s", m.rise_10_90_s}, {"settle_2pct_s", m.settle_2pct_s}, {"dc_gain", m.dc_gain}};
}

json loop_report_to_json(const shaping::LoopReport& r) {
  json freqs = json::array();
  for (const auto& v : r.frequencies) {
    freqs.push_back({
        {"omega", v.omega},
        {"worst_tracking", v.worst_tracking},
        {"worst_disturbance", v.worst_disturbance},
        {"tracking_margin_db", number(v.tracking_margin_db)},
        {"disturbance_margin_db", number(v.disturbance_margin_db)},
        {"tracking_ok", v.tracking_ok},
        {"disturbance_ok", v.disturbance_ok},
        {"nominal_loop", {{"phase_deg", v.nominal_loop.phase_deg}, {"mag_db", number(v.nominal_loop.mag_db)}}},
    });
  }
  return {
      {"frequencies", freqs},
      {"nominal_stable", r.nominal_stable},
      {"robust_stable", r.robust_stable},
      {"unstable_plants", r.unstable_plants},
      {"nominal_closed_loop_abscissa", r.nominal_closed_loop_abscissa},
      {"margins",
       {{"gain_margin_db", number(r.margins.gain_margin_db)},
        {"phase_crossover", r.margins.phase_crossover},
        {"phase_margin_deg", number(r.margins.phase_margin_deg)},
        {"gain_crossover", r.margins.gain_crossover}}},
      {"all_specs_met", r.all_specs_met},
  };
}

json response_metrics_to_json(const road::ResponseMetrics& m) {
  return {{"peak_disp", m.peak_disp}, {"rms_disp", m.rms_disp}, {"peak_accel", m.peak_accel}, {"rms_accel", m.rms_accel}};
}

json sim_result_to_json(const road::SimResult& r, std::size_t stride) {
  if (stride == 0) stride = 1;
  json t = json::array(), xa = json::array(), acc = json::array(), xt = json::array(), da = json::array();
  for (Eigen::Index k = 0; k < r.t.size(); k += static_cast<Eigen::Index>(stride)) {
    t.push_back(r.t(k));
    xa.push_back(r.x_a(k));
    acc.push_back(r.x_a_ddot(k));
    xt.push_back(r.x_t(k));
    da.push_back(r.delta_a(k));
  }
  return {{"mode", r.mode == road::LoopMode::kOpen ? "open" : "closed"},
          {"plant_stable", r.plant_stable},
          {"t", t},
          {"x_a", xa},
          {"x_a_ddot", acc},
          {"x_t", xt},
          {"delta_a", da},
          {"metrics", response_metrics_to_json(road::response_metrics(r))}};
}

}  // namespace qft::io
