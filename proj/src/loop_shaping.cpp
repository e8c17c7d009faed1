#include "qft/loop_shaping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qft::shaping {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

lti::TransferFunctiond factor(const ControllerElement& e) {
  using lti::Polynomiald;
  using lti::TransferFunctiond;
  return std::visit(
      overloaded{
          [](const Gain& g) { return TransferFunctiond::constant(g.k); },
          [](const RealPole& p) { return TransferFunctiond(Polynomiald{1.0}, Polynomiald{1.0, p.a}); },
          [](const RealZero& z) { return TransferFunctiond(Polynomiald{1.0, z.a}, Polynomiald{1.0}); },
          [](const ComplexPolePair& c) {
            const double re = std::abs(c.re);
            return TransferFunctiond(Polynomiald{1.0}, Polynomiald{1.0, 2.0 * re, re * re + c.im * c.im});
          },
          [](const ComplexZeroPair& c) {
            const double re = std::abs(c.re);
            return TransferFunctiond(Polynomiald{1.0, 2.0 * re, re * re + c.im * c.im}, Polynomiald{1.0});
          },
          [](const Integrator& i) { return TransferFunctiond(Polynomiald{1.0}, Polynomiald::monomial(i.order)); },
      },
      e);
}

}  // namespace

void validate(const ControllerElement& e) {
  std::visit(overloaded{
                 [](const Gain& g) {
                   if (!std::isfinite(g.k)) throw std::invalid_argument("gain must be finite");
                 },
                 [](const RealPole& p) {
                   if (!(p.a > 0)) throw std::invalid_argument("real pole corner must be positive");
                 },
                 [](const RealZero& z) {
                   if (!(z.a > 0)) throw std::invalid_argument("real zero corner must be positive");
                 },
                 [](const ComplexPolePair& c) {
                   if (!(c.re != 0) || !(c.im >= 0)) throw std::invalid_argument("complex pole pair needs re != 0, im >= 0");
                 },
                 [](const ComplexZeroPair& c) {
                   if (!(c.re != 0) || !(c.im >= 0)) throw std::invalid_argument("complex zero pair needs re != 0, im >= 0");
                 },
                 [](const Integrator& i) {
                   if (i.order < 1) throw std::invalid_argument("integrator order must be >= 1");
                 },
             },
             e);
}

std::string kind_name(const ControllerElement& e) {
  return std::visit(overloaded{
                        [](const Gain&) { return std::string("gain"); },
                        [](const RealPole&) { return std::string("real_pole"); },
                        [](const RealZero&) { return std::string("real_zero"); },
                        [](const ComplexPolePair&) { return std::string("complex_pole_pair"); },
                        [](const ComplexZeroPair&) { return std::string("complex_zero_pair"); },
                        [](const Integrator&) { return std::string("integrator"); },
                    },
                    e);
}

lti::TransferFunctiond compose_controller(const ControllerDesign& d) {
  auto tf = lti::TransferFunctiond::constant(1.0);
  for (const auto& e : d.elements) {
    validate(e);
    tf = tf * factor(e);
  }
  return tf;
}

ControllerDesign baseline_controller() {
  return ControllerDesign{{
      Gain{3673.0},
      RealZero{0.84},
      RealZero{20.2},
      RealPole{9.45},
      RealPole{4.3},
      ComplexPolePair{-309.6, 309.7},
  }};
}

ImproperControllerError::ImproperControllerError(int relative_degree)
    : std::invalid_argument("improper controller: relative degree " + std::to_string(relative_degree) +
                            " (numerator degree exceeds denominator degree)"),
      relative_degree_(relative_degree) {}

namespace {

double unwrap_step(double prev, double next) {
  while (next - prev > 180.0) next -= 360.0;
  while (next - prev < -180.0) next += 360.0;
  return next;
}

double phase_deg(std::complex<double> z) { return std::arg(z) * 180.0 / std::numbers::pi; }

}  // namespace

StabilityMargins stability_margins(const lti::TransferFunctiond& loop) {
  StabilityMargins m;
  constexpr int kPoints = 4000;
  const double lo = std::log10(1e-3);
  const double hi = std::log10(1e4);
  std::vector<double> w(kPoints);
  std::vector<double> mag(kPoints);
  std::vector<double> ph(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    w[i] = std::pow(10.0, lo + (hi - lo) * i / (kPoints - 1));
    const auto z = loop.at({0.0, w[i]});
    mag[i] = std::abs(z);
    ph[i] = i == 0 ? phase_deg(z) : unwrap_step(ph[i - 1], phase_deg(z));
  }

  const auto refine = [&](double a, double b, auto&& f) {
    for (int it = 0; it < 80; ++it) {
      const double mid = std::sqrt(a * b);
      ((f(a) < 0) == (f(mid) < 0) ? a : b) = mid;
    }
    return std::sqrt(a * b);
  };

  // Gain crossover: |L| = 1, take the highest-frequency one.
  for (int i = kPoints - 1; i > 0; --i) {
    if ((mag[i - 1] - 1.0) * (mag[i] - 1.0) <= 0.0 && mag[i - 1] != mag[i]) {
      const double wc = refine(w[i - 1], w[i], [&](double x) { return std::abs(loop.at({0.0, x})) - 1.0; });
      const double p = unwrap_step(ph[i - 1], phase_deg(loop.at({0.0, wc})));
      m.gain_crossover = wc;
      // Distance above the nearest odd multiple of -180.
      m.phase_margin_deg = p + 180.0 - 360.0 * std::floor((p + 180.0) / 360.0 + 0.5);
      if (m.phase_margin_deg < -180.0) m.phase_margin_deg += 360.0;
      break;
    }
  }

  // Phase crossover: unwrapped phase hits an odd multiple of -180.
  double best = bounds::kInf;
  for (int i = 1; i < kPoints; ++i) {
    const double a = ph[i - 1];
    const double b = ph[i];
    const double k_lo = std::ceil((std::min(a, b) - 180.0) / 360.0);
    const double k_hi = std::floor((std::max(a, b) - 180.0) / 360.0);
    if (k_lo > k_hi) continue;
    const double target = 180.0 + 360.0 * k_lo;
    const double base = ph[i - 1];
    const double wp = refine(w[i - 1], w[i], [&](double x) {
      return unwrap_step(base, phase_deg(loop.at({0.0, x}))) - target;
    });
    const double gm = -lti::to_db(std::abs(loop.at({0.0, wp})));
    if (std::abs(gm) < std::abs(best)) {
      best = gm;
      m.phase_crossover = wp;
    }
  }
  m.gain_margin_db = best;
  return m;
}

lti::Polynomiald characteristic_polynomial(const suspension::PlantInstance& plant, const lti::TransferFunctiond& controller) {
  return plant.Gu.den() * controller.den() + plant.Gu.num() * controller.num();
}

LoopReport validate_design(const ControllerDesign& d, const std::vector<suspension::PlantInstance>& plants,
                           const specs::TrackingSpec& tracking, const specs::DisturbanceSpec& disturbance,
                           const specs::FrequencyGrid& grid) {
  if (plants.empty()) throw std::invalid_argument("validate_design: no plants");
  const auto G = compose_controller(d);
  if (!G.is_proper()) throw ImproperControllerError(G.relative_degree());

  LoopReport report;
  const std::size_t nominal = suspension::nominal_index(plants);
  for (double w : grid) {
    FrequencyVerdict v;
    v.omega = w;
    const auto g = lti::freq_eval(G, w);
    for (const auto& p : plants) {
      const auto gu = lti::freq_eval(p.Gu, w);
      const auto gd = lti::freq_eval(p.Gd, w);
      const auto den = 1.0 + gu * g;
      const double t = den == 0.0 ? bounds::kInf : std::abs(gu * g / den);
      const double s = den == 0.0 ? bounds::kInf : std::abs(gd / den);
      v.worst_tracking = std::max(v.worst_tracking, t);
      v.worst_disturbance = std::max(v.worst_disturbance, s);
    }
    v.tracking_margin_db = tracking.delta_db - lti::to_db(v.worst_tracking);
    v.disturbance_margin_db = lti::to_db(disturbance.W_sd) - lti::to_db(v.worst_disturbance);
    v.tracking_ok = v.worst_tracking <= tracking.W_st;
    v.disturbance_ok = v.worst_disturbance <= disturbance.W_sd;
    const auto l0 = g * lti::freq_eval(plants[nominal].Gu, w);
    v.nominal_loop = l0 == 0.0 ? lti::NicholsPoint<double>{0.0, -bounds::kInf} : lti::to_nichols(l0);
    report.frequencies.push_back(v);
  }

  for (std::size_t i = 0; i < plants.size(); ++i) {
    const auto cp = characteristic_polynomial(plants[i], G);
    const double abscissa = lti::spectral_abscissa(cp);
    const bool stable = abscissa < -lti::kHurwitzMargin;
    if (i == nominal) {
      report.nominal_stable = stable;
      report.nominal_closed_loop_abscissa = abscissa;
    }
    if (!stable) ++report.unstable_plants;
  }
  report.robust_stable = report.unstable_plants == 0;
  report.margins = stability_margins(G * plants[nominal].Gu);
  report.all_specs_met = report.robust_stable &&
                         std::all_of(report.frequencies.begin(), report.frequencies.end(),
                                     [](const FrequencyVerdict& v) { return v.tracking_ok && v.disturbance_ok; });
  return report;
}

}  // namespace qft::shaping
