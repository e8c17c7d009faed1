#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qft/bounds.hpp"
#include "qft/road_sim.hpp"

namespace qft::io {

/// Bare-bones line/scatter plot rendered to an SVG string.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_line(std::vector<std::pair<double, double>> pts, std::string color, double width = 1.5);
  void add_points(std::vector<std::pair<double, double>> pts, std::string color, double radius = 1.5);
  void set_x_range(double lo, double hi);
  void set_y_range(double lo, double hi);

  std::string render(int width = 800, int height = 560) const;

 private:
  struct Series {
    std::vector<std::pair<double, double>> pts;
    std::string color;
    double size;
    bool line;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  bool fixed_x_ = false, fixed_y_ = false;
  double x_lo_ = 0, x_hi_ = 1, y_lo_ = 0, y_hi_ = 1;
};

/// Nichols chart of the nominal-loop bounds (combined spec), optional
/// template clouds, and an optional loop polyline.
std::string nichols_chart_svg(const std::vector<bounds::FrequencyBounds>& all,
                              const std::vector<std::pair<double, double>>& loop_phase_db, bool show_templates);

/// Open vs closed chassis displacement (or acceleration) over time.
std::string time_response_svg(const std::string& title, const road::SimResult& open, const road::SimResult& closed,
                              bool acceleration);

}  // namespace qft::io
