#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qft/bounds.hpp"
#include "qft/design_specs.hpp"
#include "qft/suspension.hpp"

namespace qft::shaping {

struct Gain {
  double k = 1.0;
};
/// 1 / (s + a), a > 0
struct RealPole {
  double a = 1.0;
};
/// (s + a), a > 0
struct RealZero {
  double a = 1.0;
};
/// 1 / (s^2 + 2|re| s + re^2 + im^2); re may be given negative, as written.
struct ComplexPolePair {
  double re = 1.0;
  double im = 1.0;
};
struct ComplexZeroPair {
  double re = 1.0;
  double im = 1.0;
};
/// 1 / s^order
struct Integrator {
  int order = 1;
};

using ControllerElement = std::variant<Gain, RealPole, RealZero, ComplexPolePair, ComplexZeroPair, Integrator>;

void validate(const ControllerElement& e);
std::string kind_name(const ControllerElement& e);

struct ControllerDesign {
  std::vector<ControllerElement> elements;
};

/// Product of all element factors; the empty design is 1.
lti::TransferFunctiond compose_controller(const ControllerDesign& d);

/// Zeros at -0.84 and -20.2, poles at -9.45 and -4.3, a pole pair at
/// -309.6 +- 309.7j, and gain 3673 (the leading numerator coefficient).
ControllerDesign baseline_controller();

/// Thrown when a controller cannot be simulated because it is improper.
class ImproperControllerError : public std::invalid_argument {
 public:
  ImproperControllerError(int relative_degree);
  int relative_degree() const { return relative_degree_; }

 private:
  int relative_degree_;
};

struct FrequencyVerdict {
  double omega = 0;
  double worst_tracking = 0;          ///< max over plants of |T(jw)|
  double worst_disturbance = 0;       ///< max over plants of |Gd/(1+Gu G)|
  double tracking_margin_db = 0;      ///< 20log W_st - 20log worst (>= 0 passes)
  double disturbance_margin_db = 0;
  bool tracking_ok = false;
  bool disturbance_ok = false;
  lti::NicholsPoint<double> nominal_loop{};  ///< L0(jw) = G P0
};

struct StabilityMargins {
  double gain_margin_db = bounds::kInf;  ///< inf when the phase never crosses -180
  double phase_crossover = 0;            ///< rad/s, 0 when absent
  double phase_margin_deg = bounds::kInf;
  double gain_crossover = 0;             ///< rad/s, 0 when absent
};

/// Margins of an open loop from a log sweep with bisection refinement on
/// [1e-3, 1e4] rad/s.
StabilityMargins stability_margins(const lti::TransferFunctiond& loop);

struct LoopReport {
  std::vector<FrequencyVerdict> frequencies;
  bool nominal_stable = false;
  bool robust_stable = false;
  std::size_t unstable_plants = 0;
  double nominal_closed_loop_abscissa = 0;  ///< max real part of closed-loop poles
  StabilityMargins margins;
  bool all_specs_met = false;
};

/// Closed-loop characteristic polynomial den(Gu) den(G) + num(Gu) num(G).
lti::Polynomiald characteristic_polynomial(const suspension::PlantInstance& plant, const lti::TransferFunctiond& controller);

/// Direct frequency sweep over every plant; independent of the bound solver.
LoopReport validate_design(const ControllerDesign& d, const std::vector<suspension::PlantInstance>& plants,
                           const specs::TrackingSpec& tracking, const specs::DisturbanceSpec& disturbance,
                           const specs::FrequencyGrid& grid);

}  // namespace qft::shaping
