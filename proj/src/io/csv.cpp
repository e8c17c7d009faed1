#include "qft/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qft::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return bounds::kInf;
  if (s == "-inf") return -bounds::kInf;
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("csv: bad number '" + s + "'");
  return v;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Data lines after checking the header.
std::vector<std::vector<std::string>> parse_table(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) throw std::invalid_argument("csv: expected header '" + header + "'");
  const auto columns = split(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) throw std::invalid_argument("csv: wrong column count in '" + line + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

const char* kBoundsHeader = "omega,phase_deg,interval_index,lo_db,hi_db,spec_kind";
const char* kTemplatesHeader = "omega,plant_index,is_nominal,gu_re,gu_im,gd_re,gd_im,mag_db,phase_deg";
const char* kSimHeader = "t,x_a,x_a_ddot,x_t,delta_a";

}  // namespace

std::vector<BoundRow> bound_rows(const bounds::BoundCurve& b) {
  std::vector<BoundRow> rows;
  const auto kind = bounds::to_string(b.kind);
  for (std::size_t i = 0; i < b.phases_deg.size(); ++i) {
    const auto& set = b.feasible[i];
    if (set.is_empty()) {
      rows.push_back({b.omega, b.phases_deg[i], -1, std::nan(""), std::nan(""), kind});
      continue;
    }
    int idx = 0;
    for (const auto& iv : set.intervals()) {
      rows.push_back({b.omega, b.phases_deg[i], idx++, iv.lo > 0 ? lti::to_db(iv.lo) : -bounds::kInf, lti::to_db(iv.hi), kind});
    }
  }
  return rows;
}

std::string write_bounds_csv(const std::vector<bounds::BoundCurve>& curves) {
  std::string out = std::string(kBoundsHeader) + "\n";
  for (const auto& c : curves) {
    for (const auto& r : bound_rows(c)) {
      out += format_double(r.omega) + "," + format_double(r.phase_deg) + "," + std::to_string(r.interval_index) + "," +
             format_double(r.lo_db) + "," + format_double(r.hi_db) + "," + r.spec_kind + "\n";
    }
  }
  return out;
}

std::vector<BoundRow> read_bounds_csv(const std::string& text) {
  std::vector<BoundRow> rows;
  for (const auto& c : parse_table(text, kBoundsHeader)) {
    rows.push_back({parse_double(c[0]), parse_double(c[1]), std::stoi(c[2]), parse_double(c[3]), parse_double(c[4]), c[5]});
  }
  return rows;
}

std::vector<bounds::BoundCurve> curves_from_rows(const std::vector<BoundRow>& rows) {
  std::vector<bounds::BoundCurve> curves;
  std::map<std::pair<std::string, double>, std::size_t> index;
  std::vector<std::vector<std::vector<bounds::Interval>>> pending;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.spec_kind, r.omega);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, curves.size()).first;
      curves.push_back({r.omega, bounds::spec_kind_from_string(r.spec_kind), {}, {}});
      pending.emplace_back();
    }
    auto& curve = curves[it->second];
    auto& sets = pending[it->second];
    if (curve.phases_deg.empty() || curve.phases_deg.back() != r.phase_deg) {
      curve.phases_deg.push_back(r.phase_deg);
      sets.emplace_back();
    }
    if (r.interval_index >= 0) {
      sets.back().push_back({std::isinf(r.lo_db) ? 0.0 : lti::from_db(r.lo_db), lti::from_db(r.hi_db)});
    }
  }
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (auto& s : pending[i]) curves[i].feasible.emplace_back(std::move(s));
  return curves;
}

std::string write_templates_csv(const std::vector<bounds::Template>& templates) {
  std::string out = std::string(kTemplatesHeader) + "\n";
  for (const auto& t : templates) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto np = lti::to_nichols(t.gu[i]);
      out += format_double(t.omega) + "," + std::to_string(i) + "," + (i == t.nominal_index ? "1" : "0") + "," +
             format_double(t.gu[i].real()) + "," + format_double(t.gu[i].imag()) + "," + format_double(t.gd[i].real()) + "," +
             format_double(t.gd[i].imag()) + "," + format_double(np.mag_db) + "," + format_double(np.phase_deg) + "\n";
    }
  }
  return out;
}

std::vector<TemplateRow> read_templates_csv(const std::string& text) {
  std::vector<TemplateRow> rows;
  for (const auto& c : parse_table(text, kTemplatesHeader)) {
    rows.push_back({parse_double(c[0]), std::stoi(c[1]), c[2] == "1", parse_double(c[3]), parse_double(c[4]),
                    parse_double(c[5]), parse_double(c[6]), parse_double(c[7]), parse_double(c[8])});
  }
  return rows;
}

std::string write_sim_csv(const road::SimResult& r) {
  std::string out = std::string(kSimHeader) + "\n";
  for (Eigen::Index k = 0; k < r.t.size(); ++k) {
    out += format_double(r.t(k)) + "," + format_double(r.x_a(k)) + "," + format_double(r.x_a_ddot(k)) + "," +
           format_double(r.x_t(k)) + "," + format_double(r.delta_a(k)) + "\n";
  }
  return out;
}

std::vector<SimRow> read_sim_csv(const std::string& text) {
  std::vector<SimRow> rows;
  for (const auto& c : parse_table(text, kSimHeader)) {
    rows.push_back({parse_double(c[0]), parse_double(c[1]), parse_double(c[2]), parse_double(c[3]), parse_double(c[4])});
  }
  return rows;
}

}  // namespace qft::io
