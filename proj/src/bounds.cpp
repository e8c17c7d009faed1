#include "qft/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qft::bounds {

namespace {

Complex unit_phasor(double phase_deg) { return std::polar(1.0, phase_deg * std::numbers::pi / 180.0); }

}  // namespace

Template compute_template(const std::vector<suspension::PlantInstance>& plants, double omega) {
  if (plants.empty()) throw std::invalid_argument("compute_template: no plants");
  Template t;
  t.omega = omega;
  t.gu.reserve(plants.size());
  t.gd.reserve(plants.size());
  for (std::size_t i = 0; i < plants.size(); ++i) {
    const Complex gu = lti::freq_eval(plants[i].Gu, omega);
    const Complex gd = lti::freq_eval(plants[i].Gd, omega);
    if (gu == Complex(0.0)) {
      throw std::domain_error("compute_template: plant " + std::to_string(i) + " has zero response at omega = " +
                              std::to_string(omega));
    }
    t.gu.push_back(gu);
    t.gd.push_back(gd);
  }
  t.nominal_index = suspension::nominal_index(plants);
  return t;
}

double template_spread_db(const Template& t) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& p : t.gu) {
    const double db = lti::to_db(std::abs(p));
    lo = std::min(lo, db);
    hi = std::max(hi, db);
  }
  return hi - lo;
}

GainSet::GainSet(std::vector<Interval> intervals) {
  std::vector<Interval> kept;
  for (auto iv : intervals) {
    iv.lo = std::max(iv.lo, 0.0);
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.hi < iv.lo) continue;
    kept.push_back(iv);
  }
  std::sort(kept.begin(), kept.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : kept) {
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi)
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    else
      intervals_.push_back(iv);
  }
}

bool GainSet::contains(double g) const {
  return std::any_of(intervals_.begin(), intervals_.end(), [g](const Interval& iv) { return g >= iv.lo && g <= iv.hi; });
}

double GainSet::distance_to_endpoint(double g) const {
  double best = kInf;
  for (const auto& iv : intervals_) {
    if (iv.lo > 0.0) best = std::min(best, std::abs(g - iv.lo));
    if (std::isfinite(iv.hi)) best = std::min(best, std::abs(g - iv.hi));
  }
  return best;
}

GainSet GainSet::intersect(const GainSet& other) const {
  std::vector<Interval> out;
  std::size_t i = 0;
  std::size_t j = 0;
  const auto& a = intervals_;
  const auto& b = other.intervals_;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo);
    const double hi = std::min(a[i].hi, b[j].hi);
    if (lo <= hi) out.push_back({lo, hi});
    (a[i].hi < b[j].hi) ? ++i : ++j;
  }
  return GainSet(std::move(out));
}

GainSet GainSet::scaled(double factor) const {
  std::vector<Interval> out;
  for (const auto& iv : intervals_) out.push_back({iv.lo * factor, iv.hi * factor});
  return GainSet(std::move(out));
}

GainSet solve_general(const GeneralBoundProblem& pb, double W, double phase_deg) {
  if (!(W > 0)) throw std::invalid_argument("solve_general: W must be positive");
  const Complex u = unit_phasor(phase_deg);
  const double W2 = W * W;
  const double alpha = std::norm(pb.B_term) - W2 * std::norm(pb.D_term);
  const double beta = 2.0 * std::real((std::conj(pb.A_term) * pb.B_term - W2 * std::conj(pb.C_term) * pb.D_term) * u);
  const double gamma = std::norm(pb.A_term) - W2 * std::norm(pb.C_term);
  const double alpha_scale = std::norm(pb.B_term) + W2 * std::norm(pb.D_term);

  // Degenerate leading term: beta g + gamma <= 0.
  if (std::abs(alpha) <= 1e-14 * alpha_scale) {
    if (beta == 0.0) return gamma <= 0.0 ? GainSet::all() : GainSet::empty();
    const double root = -gamma / beta;
    if (beta > 0.0) return GainSet({{0.0, root}});
    return GainSet({{root, kInf}});
  }

  const double disc = beta * beta - 4.0 * alpha * gamma;
  if (disc <= 0.0) {
    // No sign change: the quadratic keeps the sign of alpha (touching zero at most once).
    if (alpha < 0.0) return GainSet::all();
    if (disc == 0.0) {
      const double r = -beta / (2.0 * alpha);
      return GainSet({{r, r}});
    }
    return GainSet::empty();
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (beta + std::copysign(sq, beta));
  double r1 = q / alpha;
  double r2 = gamma / q;
  if (r1 > r2) std::swap(r1, r2);
  if (alpha > 0.0) return GainSet({{r1, r2}});
  return GainSet({{-kInf, r1}, {r2, kInf}});
}

std::string to_string(SpecKind kind) {
  switch (kind) {
    case SpecKind::kTracking:
      return "tracking";
    case SpecKind::kDisturbance:
      return "disturbance";
    case SpecKind::kIntersection:
      return "intersection";
  }
  return "unknown";
}

SpecKind spec_kind_from_string(const std::string& s) {
  if (s == "tracking") return SpecKind::kTracking;
  if (s == "disturbance") return SpecKind::kDisturbance;
  if (s == "intersection") return SpecKind::kIntersection;
  throw std::invalid_argument("unknown spec kind '" + s + "'");
}

std::vector<double> default_phase_grid(double step_deg) {
  if (!(step_deg > 0)) throw std::invalid_argument("default_phase_grid: step must be positive");
  const int n = static_cast<int>(std::llround(360.0 / step_deg));
  std::vector<double> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = -360.0 + i * step_deg;
  out.back() = 0.0;
  return out;
}

bool BoundCurve::has_empty_phase() const {
  return std::any_of(feasible.begin(), feasible.end(), [](const GainSet& s) { return s.is_empty(); });
}

GainSet tracking_feasible(Complex plant, double W, double phase_deg) {
  return solve_general({Complex(0.0), plant, Complex(1.0), plant}, W, phase_deg);
}

GainSet disturbance_feasible(Complex gd, Complex gu, double W, double phase_deg) {
  return solve_general({gd, Complex(0.0), Complex(1.0), gu}, W, phase_deg);
}

BoundCurve tracking_bound(const Template& t, double W, const std::vector<double>& phases_deg) {
  BoundCurve b{t.omega, SpecKind::kTracking, phases_deg, {}};
  b.feasible.reserve(phases_deg.size());
  for (double phi : phases_deg) {
    GainSet set = GainSet::all();
    for (const auto& p : t.gu) {
      set = set.intersect(tracking_feasible(p, W, phi));
      if (set.is_empty()) break;
    }
    b.feasible.push_back(std::move(set));
  }
  return b;
}

BoundCurve disturbance_bound(const Template& t, double W, const std::vector<double>& phases_deg) {
  BoundCurve b{t.omega, SpecKind::kDisturbance, phases_deg, {}};
  b.feasible.reserve(phases_deg.size());
  for (double phi : phases_deg) {
    GainSet set = GainSet::all();
    for (std::size_t i = 0; i < t.size(); ++i) {
      set = set.intersect(disturbance_feasible(t.gd[i], t.gu[i], W, phi));
      if (set.is_empty()) break;
    }
    b.feasible.push_back(std::move(set));
  }
  return b;
}

BoundCurve intersect_bounds(const std::vector<BoundCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("intersect_bounds: no curves");
  BoundCurve out = curves.front();
  if (curves.size() > 1) out.kind = SpecKind::kIntersection;
  for (std::size_t c = 1; c < curves.size(); ++c) {
    if (curves[c].omega != out.omega) throw std::invalid_argument("intersect_bounds: frequency mismatch");
    if (curves[c].phases_deg != out.phases_deg) throw std::invalid_argument("intersect_bounds: phase grid mismatch");
    for (std::size_t i = 0; i < out.feasible.size(); ++i) out.feasible[i] = out.feasible[i].intersect(curves[c].feasible[i]);
  }
  return out;
}

bool feasible_oracle(const Template& t, SpecKind kind, double W, double phase_deg, double g) {
  if (g < 0.0) throw std::invalid_argument("feasible_oracle: negative gain");
  const Complex G = g * unit_phasor(phase_deg);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Complex den = 1.0 + t.gu[i] * G;
    if (den == Complex(0.0)) return false;
    double mag = 0.0;
    switch (kind) {
      case SpecKind::kTracking:
        mag = std::abs(t.gu[i] * G / den);
        break;
      case SpecKind::kDisturbance:
        mag = std::abs(t.gd[i] / den);
        break;
      case SpecKind::kIntersection:
        if (!feasible_oracle(t, SpecKind::kTracking, W, phase_deg, g)) return false;
        return feasible_oracle(t, SpecKind::kDisturbance, W, phase_deg, g);
    }
    if (!(mag <= W)) return false;
  }
  return true;
}

double wrap_phase_deg(double deg) {
  while (deg < -360.0) deg += 360.0;
  while (deg > 0.0) deg -= 360.0;
  return deg;
}

LoopBound shift_bound(const BoundCurve& b, double phase_shift_deg, double gain_shift_db) {
  LoopBound out{b.omega, b.kind, {}};
  out.points.reserve(b.phases_deg.size());
  for (std::size_t i = 0; i < b.phases_deg.size(); ++i) {
    LoopBoundPoint pt;
    pt.controller_phase_deg = b.phases_deg[i];
    pt.loop_phase_deg = wrap_phase_deg(b.phases_deg[i] + phase_shift_deg);
    for (const auto& iv : b.feasible[i].intervals()) {
      pt.lo_db.push_back((iv.lo > 0.0 ? lti::to_db(iv.lo) : -kInf) + gain_shift_db);
      pt.hi_db.push_back(lti::to_db(iv.hi) + gain_shift_db);
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

LoopBound nominal_loop_bound(const BoundCurve& b, Complex p0) {
  if (p0 == Complex(0.0)) throw std::invalid_argument("nominal_loop_bound: zero nominal response");
  return shift_bound(b, lti::nichols_phase_deg(p0), lti::to_db(std::abs(p0)));
}

std::vector<FrequencyBounds> compute_all_bounds(const std::vector<suspension::PlantInstance>& plants,
                                                const specs::FrequencyGrid& grid, const specs::TrackingSpec& tracking,
                                                const specs::DisturbanceSpec& disturbance,
                                                const std::vector<double>& phases_deg) {
  std::vector<FrequencyBounds> out;
  out.reserve(grid.size());
  for (double w : grid) {
    FrequencyBounds fb;
    fb.tmpl = compute_template(plants, w);
    fb.tracking = tracking_bound(fb.tmpl, tracking.W_st, phases_deg);
    fb.disturbance = disturbance_bound(fb.tmpl, disturbance.W_sd, phases_deg);
    fb.combined = intersect_bounds({fb.tracking, fb.disturbance});
    out.push_back(std::move(fb));
  }
  return out;
}

std::vector<SpreadRow> tracking_spread_report(const std::vector<FrequencyBounds>& all, const specs::EnvelopePair& env) {
  std::vector<SpreadRow> rows;
  for (const auto& fb : all) {
    SpreadRow r;
    r.omega = fb.tmpl.omega;
    r.template_spread_db = template_spread_db(fb.tmpl);
    r.allowed_spread_db = lti::to_db(std::abs(lti::freq_eval(env.upper, r.omega))) -
                          lti::to_db(std::abs(lti::freq_eval(env.lower, r.omega)));
    r.ok = r.template_spread_db <= r.allowed_spread_db;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace qft::bounds
