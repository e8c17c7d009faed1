#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qft/lti.hpp"

namespace qft::suspension {

/// Physical and linearization parameters of the pneumatic quarter-car.
/// Units: kg, N s/m, N/m; Q/P/S carry the units of their A-matrix slots.
struct PlantParams {
  double m_a = 90.0;    ///< chassis mass
  double m_t = 16.0;    ///< wheel mass
  double C_a = 50.0;    ///< suspension damping
  double C_t = 600.0;   ///< tire damping
  double K_t = 1e5;     ///< tire stiffness
  double Q1 = -175.0;
  double Q2 = 6905.0;
  double P1 = 1486.0;
  double P2 = 58720.0;
  double S1 = 60.162;
  double S2 = 2380.0;
  double S3 = 51.0;

  void validate() const;
  bool operator==(const PlantParams&) const = default;
};

/// Symmetric half-ranges of the varied physical parameters. The
/// linearization constants Q/P/S stay at their nominal values.
struct HalfRanges {
  double m_a = 10.0;
  double m_t = 5.0;
  double C_a = 10.0;
  double C_t = 100.0;
  double K_t = 10.0;
};

struct UncertaintySet {
  PlantParams nominal;
  HalfRanges half_ranges;

  void validate() const;
};

struct PlantInstance {
  PlantParams params;
  lti::StateSpaced ss;
  lti::TransferFunctiond Gu;
  lti::TransferFunctiond Gd;
  bool is_nominal = false;
};

/// The five-state model: x = (x_a, x_a', x_t, x_t', m_as), control input is
/// the orifice area, disturbance input is road displacement, output x_a.
lti::StateSpaced build_state_space(const PlantParams& p);

struct PlantTfs {
  lti::TransferFunctiond Gu;
  lti::TransferFunctiond Gd;
};

/// Control and disturbance channels of the model, sharing one monic
/// denominator (the characteristic polynomial of A).
PlantTfs derive_plant_tfs(const lti::StateSpaced& ss);

PlantInstance make_instance(const PlantParams& p, bool is_nominal);

/// Full factorial grid with `levels` evenly spaced values per varied
/// parameter. The nominal instance is always present, flagged, and first;
/// grid points follow with m_a varying slowest.
std::vector<PlantInstance> sample_plants(const UncertaintySet& u, int levels);

/// Index of the nominal instance (throws if none is flagged).
std::size_t nominal_index(const std::vector<PlantInstance>& plants);

// ---------------------------------------------------------------------------
// Comparison against the published interval coefficients.

enum class CoeffFamily { kGd, kDen, kGu };  // a, b, c

struct PublishedCoefficient {
  std::string name;   ///< a1..a5, b1..b5, c1..c5
  CoeffFamily family;
  int index;          ///< 1..5; coefficient of s^(5 - index)
  double lo;
  double hi;
  bool fixed;         ///< single printed value (lo == hi)
};

struct PublishedIntervals {
  std::vector<PublishedCoefficient> coefficients;

  /// The values printed for the air-suspension model.
  static PublishedIntervals published();
};

struct CoefficientCheck {
  std::string name;
  double computed_min = 0;
  double computed_max = 0;
  double nominal = 0;
  double published_lo = 0;
  double published_hi = 0;
  bool fixed = false;
  bool near_zero = false;           ///< judged by the noise-floor rule
  bool range_intersects = false;    ///< computed range meets the published interval
  bool range_within_slack = false;  ///< computed range inside the published interval +-5%
  bool nominal_ok = false;          ///< strictly inside, within 1.5% if fixed, or below noise floor
  double nominal_rel_error = 0;     ///< for fixed values
  std::string note;
};

struct IntervalReport {
  std::vector<CoefficientCheck> checks;
  std::vector<std::string> discrepancies;
  bool pass = false;  ///< every nominal check passes and every range intersects

  const CoefficientCheck& at(const std::string& name) const;
};

inline constexpr double kRangeSlack = 0.05;
inline constexpr double kFixedTolerance = 0.015;
inline constexpr double kNoiseFloor = 1e-6;

/// Coefficient of the given family/index (1..5) for one instance, with the
/// polynomial padded to degree 4 (numerators) or 5 (denominator, monic).
double coefficient(const PlantInstance& plant, CoeffFamily family, int index);

IntervalReport check_published_intervals(const std::vector<PlantInstance>& plants, const PublishedIntervals& ref);

}  // namespace qft::suspension
