#pragma once

#include <string>
#include <vector>

#include "qft/bounds.hpp"
#include "qft/road_sim.hpp"

namespace qft::io {

/// Shortest round-trip decimal text ("inf", "-inf", "nan" for non-finite).
std::string format_double(double v);
double parse_double(const std::string& s);

/// One bound row: an interval of feasible controller gain in dB at one
/// (omega, phase). An empty phase is one row with interval_index -1 and
/// NaN bounds.
struct BoundRow {
  double omega = 0;
  double phase_deg = 0;
  int interval_index = 0;
  double lo_db = 0;
  double hi_db = 0;
  std::string spec_kind;
};

std::vector<BoundRow> bound_rows(const bounds::BoundCurve& b);
std::string write_bounds_csv(const std::vector<bounds::BoundCurve>& curves);
std::vector<BoundRow> read_bounds_csv(const std::string& text);
/// Rebuilds curves (linear-gain sets) from rows, grouped by (spec_kind, omega) in first-seen order.
std::vector<bounds::BoundCurve> curves_from_rows(const std::vector<BoundRow>& rows);

struct TemplateRow {
  double omega = 0;
  int plant_index = 0;
  bool is_nominal = false;
  double gu_re = 0, gu_im = 0;
  double gd_re = 0, gd_im = 0;
  double mag_db = 0;
  double phase_deg = 0;
};

std::string write_templates_csv(const std::vector<bounds::Template>& templates);
std::vector<TemplateRow> read_templates_csv(const std::string& text);

struct SimRow {
  double t = 0, x_a = 0, x_a_ddot = 0, x_t = 0, delta_a = 0;
};

std::string write_sim_csv(const road::SimResult& r);
std::vector<SimRow> read_sim_csv(const std::string& text);

}  // namespace qft::io
