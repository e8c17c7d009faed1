#include "qft/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qft::io {

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(std::vector<std::pair<double, double>> pts, std::string color, double width) {
  series_.push_back({std::move(pts), std::move(color), width, true});
}

void SvgPlot::add_points(std::vector<std::pair<double, double>> pts, std::string color, double radius) {
  series_.push_back({std::move(pts), std::move(color), radius, false});
}

void SvgPlot::set_x_range(double lo, double hi) {
  fixed_x_ = true;
  x_lo_ = lo;
  x_hi_ = hi;
}

void SvgPlot::set_y_range(double lo, double hi) {
  fixed_y_ = true;
  y_lo_ = lo;
  y_hi_ = hi;
}

std::string SvgPlot::render(int width, int height) const {
  double xl = x_lo_, xh = x_hi_, yl = y_lo_, yh = y_hi_;
  if (!fixed_x_ || !fixed_y_) {
    double ax = std::numeric_limits<double>::infinity(), bx = -ax, ay = ax, by = -ax;
    for (const auto& s : series_)
      for (const auto& [x, y] : s.pts) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        ax = std::min(ax, x);
        bx = std::max(bx, x);
        ay = std::min(ay, y);
        by = std::max(by, y);
      }
    if (!std::isfinite(ax)) ax = 0, bx = 1, ay = 0, by = 1;
    if (bx == ax) bx = ax + 1;
    if (by == ay) by = ay + 1;
    if (!fixed_x_) xl = ax, xh = bx;
    if (!fixed_y_) {
      const double pad = 0.05 * (by - ay);
      yl = ay - pad, yh = by + pad;
    }
  }
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  const auto sx = [&](double x) { return left + (x - xl) / (xh - xl) * pw; };
  const auto sy = [&](double y) { return top + (yh - std::clamp(y, yl, yh)) / (yh - yl) * ph; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                    std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt2(width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title_ + "</text>\n";
  out += "<rect x=\"" + fmt2(left) + "\" y=\"" + fmt2(top) + "\" width=\"" + fmt2(pw) + "\" height=\"" + fmt2(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xl + (xh - xl) * i / 5.0;
    const double yv = yl + (yh - yl) * i / 5.0;
    out += "<line x1=\"" + fmt2(sx(xv)) + "\" y1=\"" + fmt2(top) + "\" x2=\"" + fmt2(sx(xv)) + "\" y2=\"" + fmt2(top + ph) +
           "\" stroke=\"#ddd\"/>\n";
    out += "<line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(sy(yv)) + "\" x2=\"" + fmt2(left + pw) + "\" y2=\"" + fmt2(sy(yv)) +
           "\" stroke=\"#ddd\"/>\n";
    out += "<text x=\"" + fmt2(sx(xv)) + "\" y=\"" + fmt2(top + ph + 16) + "\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
    out += "<text x=\"" + fmt2(left - 6) + "\" y=\"" + fmt2(sy(yv) + 4) + "\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
  }
  out += "<text x=\"" + fmt2(left + pw / 2) + "\" y=\"" + fmt2(height - 10.0) + "\" text-anchor=\"middle\">" + x_label_ + "</text>\n";
  out += "<text transform=\"translate(16," + fmt2(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" + y_label_ + "</text>\n";

  for (const auto& s : series_) {
    if (s.line) {
      std::string path;
      bool pen = false;
      for (const auto& [x, y] : s.pts) {
        if (!std::isfinite(x) || !std::isfinite(y)) {
          pen = false;
          continue;
        }
        path += (pen ? " L" : " M") + fmt2(sx(x)) + " " + fmt2(sy(y));
        pen = true;
      }
      if (!path.empty())
        out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" + fmt2(s.size) + "\"/>\n";
    } else {
      for (const auto& [x, y] : s.pts) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        out += "<circle cx=\"" + fmt2(sx(x)) + "\" cy=\"" + fmt2(sy(y)) + "\" r=\"" + fmt2(s.size) + "\" fill=\"" + s.color + "\"/>\n";
      }
    }
  }
  out += "</svg>\n";
  return out;
}

std::string nichols_chart_svg(const std::vector<bounds::FrequencyBounds>& all,
                              const std::vector<std::pair<double, double>>& loop_phase_db, bool show_templates) {
  SvgPlot plot("Nominal-loop bounds (Nichols plane)", "phase (deg)", "magnitude (dB)");
  plot.set_x_range(-360, 0);
  plot.set_y_range(bounds::kDisplayMinDb, bounds::kDisplayMaxDb);
  for (std::size_t f = 0; f < all.size(); ++f) {
    const auto& fb = all[f];
    const std::string color = kPalette[f % 10];
    const auto lb = bounds::nominal_loop_bound(fb.combined, fb.tmpl.nominal());
    // Each finite endpoint is a boundary of the forbidden region; sort by loop phase per interval slot.
    std::vector<std::pair<double, double>> upper, lower;
    for (const auto& p : lb.points) {
      if (p.lo_db.empty()) {
        plot.add_line({{p.loop_phase_deg, bounds::kDisplayMinDb}, {p.loop_phase_deg, bounds::kDisplayMaxDb}}, color, 0.5);
        continue;
      }
      for (std::size_t i = 0; i < p.lo_db.size(); ++i) {
        if (std::isfinite(p.lo_db[i])) upper.emplace_back(p.loop_phase_deg, p.lo_db[i]);
        if (std::isfinite(p.hi_db[i])) lower.emplace_back(p.loop_phase_deg, p.hi_db[i]);
      }
    }
    std::sort(upper.begin(), upper.end());
    std::sort(lower.begin(), lower.end());
    plot.add_points(upper, color, 1.8);
    plot.add_points(lower, color, 1.0);
    if (show_templates) {
      std::vector<std::pair<double, double>> cloud;
      for (const auto& g : fb.tmpl.gu) {
        const auto np = lti::to_nichols(g);
        cloud.emplace_back(np.phase_deg, np.mag_db);
      }
      plot.add_points(cloud, color, 0.8);
    }
  }
  if (!loop_phase_db.empty()) plot.add_line(loop_phase_db, "black", 1.8);
  return plot.render();
}

std::string time_response_svg(const std::string& title, const road::SimResult& open, const road::SimResult& closed,
                              bool acceleration) {
  SvgPlot plot(title, "time (s)", acceleration ? "chassis acceleration (m/s^2)" : "chassis displacement (m)");
  const auto series = [&](const road::SimResult& r) {
    std::vector<std::pair<double, double>> pts;
    const auto& y = acceleration ? r.x_a_ddot : r.x_a;
    const Eigen::Index stride = std::max<Eigen::Index>(1, r.t.size() / 2000);
    for (Eigen::Index k = 0; k < r.t.size(); k += stride) pts.emplace_back(r.t(k), y(k));
    return pts;
  };
  plot.add_line(series(open), "#d62728");
  plot.add_line(series(closed), "#1f77b4");
  return plot.render();
}

}  // namespace qft::io
