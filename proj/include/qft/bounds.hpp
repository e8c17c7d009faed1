#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "qft/design_specs.hpp"
#include "qft/suspension.hpp"

namespace qft::bounds {

using Complex = std::complex<double>;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Plant responses at one frequency across the sampled uncertainty set.
struct Template {
  double omega = 0;
  std::vector<Complex> gu;  ///< control channel, one per plant
  std::vector<Complex> gd;  ///< disturbance channel, same order
  std::size_t nominal_index = 0;

  std::size_t size() const { return gu.size(); }
  Complex nominal() const { return gu.at(nominal_index); }
};

Template compute_template(const std::vector<suspension::PlantInstance>& plants, double omega);

/// Max minus min of 20 log10 |Gu| over the template.
double template_spread_db(const Template& t);

/// Closed interval of linear controller gains; hi may be +inf.
struct Interval {
  double lo = 0;
  double hi = kInf;
  bool operator==(const Interval&) const = default;
};

/// Union of disjoint, sorted closed gain intervals inside [0, inf].
class GainSet {
 public:
  GainSet() = default;
  explicit GainSet(std::vector<Interval> intervals);

  static GainSet all() { return GainSet({{0.0, kInf}}); }
  static GainSet empty() { return GainSet(); }

  bool is_empty() const { return intervals_.empty(); }
  bool is_all() const { return intervals_.size() == 1 && intervals_[0].lo == 0.0 && intervals_[0].hi == kInf; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  bool contains(double g) const;
  /// Distance from g to the nearest finite interval endpoint.
  double distance_to_endpoint(double g) const;

  GainSet intersect(const GainSet& other) const;
  GainSet scaled(double factor) const;

  bool operator==(const GainSet&) const = default;

 private:
  std::vector<Interval> intervals_;
};

/// |(A + B G) / (C + D G)| <= W for one plant at one frequency.
struct GeneralBoundProblem {
  Complex A_term;
  Complex B_term;
  Complex C_term;
  Complex D_term;
};

/// Closed-form feasible gains g >= 0 at controller phase phi (degrees):
/// |A + B g e^{j phi}|^2 - W^2 |C + D g e^{j phi}|^2 <= 0 is a quadratic
/// in g whose roots are found with the cancellation-free quadratic formula.
GainSet solve_general(const GeneralBoundProblem& problem, double W, double phase_deg);

enum class SpecKind { kTracking, kDisturbance, kIntersection };
std::string to_string(SpecKind kind);
SpecKind spec_kind_from_string(const std::string& s);

/// Default controller phase grid: -360..0 in 5 degree steps.
std::vector<double> default_phase_grid(double step_deg = 5.0);

struct BoundCurve {
  double omega = 0;
  SpecKind kind = SpecKind::kTracking;
  std::vector<double> phases_deg;
  std::vector<GainSet> feasible;  ///< one per phase

  bool has_empty_phase() const;
};

/// Feasible controller gains for one plant and one phase under each spec.
GainSet tracking_feasible(Complex plant, double W, double phase_deg);
GainSet disturbance_feasible(Complex gd, Complex gu, double W, double phase_deg);

BoundCurve tracking_bound(const Template& t, double W, const std::vector<double>& phases_deg);
BoundCurve disturbance_bound(const Template& t, double W, const std::vector<double>& phases_deg);
BoundCurve intersect_bounds(const std::vector<BoundCurve>& curves);

/// Direct evaluation of the closed-loop magnitude inequality for every
/// plant in the template at controller value g e^{j phi}.
bool feasible_oracle(const Template& t, SpecKind kind, double W, double phase_deg, double g);

/// A bound translated to the nominal-loop plane L0 = G P0.
struct LoopBoundPoint {
  double controller_phase_deg = 0;
  double loop_phase_deg = 0;
  std::vector<double> lo_db;  ///< -inf for gain 0
  std::vector<double> hi_db;  ///< +inf when unbounded
};

struct LoopBound {
  double omega = 0;
  SpecKind kind = SpecKind::kTracking;
  std::vector<LoopBoundPoint> points;
};

/// Wrap a phase into the closed range [-360, 0].
double wrap_phase_deg(double deg);

LoopBound shift_bound(const BoundCurve& b, double phase_shift_deg, double gain_shift_db);
LoopBound nominal_loop_bound(const BoundCurve& b, Complex p0);

/// Display window for unbounded intervals.
inline constexpr double kDisplayMinDb = -60.0;
inline constexpr double kDisplayMaxDb = 80.0;

/// Everything computed for one design frequency.
struct FrequencyBounds {
  Template tmpl;
  BoundCurve tracking;
  BoundCurve disturbance;
  BoundCurve combined;
};

std::vector<FrequencyBounds> compute_all_bounds(const std::vector<suspension::PlantInstance>& plants,
                                                const specs::FrequencyGrid& grid, const specs::TrackingSpec& tracking,
                                                const specs::DisturbanceSpec& disturbance,
                                                const std::vector<double>& phases_deg);

/// Advisory two-model spread check: the template magnitude spread against
/// the allowed 20log|T_upper| - 20log|T_lower| at each frequency.
struct SpreadRow {
  double omega = 0;
  double template_spread_db = 0;
  double allowed_spread_db = 0;
  bool ok = false;
};

std::vector<SpreadRow> tracking_spread_report(const std::vector<FrequencyBounds>& all, const specs::EnvelopePair& env);

}  // namespace qft::bounds
