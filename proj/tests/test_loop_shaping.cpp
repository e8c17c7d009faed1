#include <gtest/gtest.h>

#include <algorithm>

#include "qft/loop_shaping.hpp"
#include "qft/road_sim.hpp"

using namespace qft;
using namespace qft::shaping;
using lti::Polynomiald;
using lti::TransferFunctiond;

namespace {

const std::vector<suspension::PlantInstance>& corner_plants() {
  static const auto plants = suspension::sample_plants(suspension::UncertaintySet{}, 2);
  return plants;
}

}  // namespace

TEST(Controller, BaselineElementsReproducePrintedCoefficients) {
  const auto G = compose_controller(baseline_controller());
  const std::vector<double> num{3673, 7.729e4, 6.233e4}, den{1, 632.9, 2.003e5, 2.662e6, 7.791e6};
  ASSERT_EQ(G.num().degree(), 2);
  ASSERT_EQ(G.den().degree(), 4);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(G.num().coeffs()(i) / num[i], 1.0, 1e-3);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(G.den().coeffs()(i) / den[i], 1.0, 1e-3);
}

TEST(Controller, CompositionIsOrderInvariant) {
  auto d = baseline_controller();
  d.elements.push_back(Integrator{1});
  d.elements.push_back(ComplexZeroPair{-3.0, 4.0});
  const auto ref = compose_controller(d);
  std::sort(d.elements.begin(), d.elements.end(), [](const auto& a, const auto& b) { return kind_name(a) < kind_name(b); });
  for (int perm = 0; perm < 20; ++perm) {
    std::next_permutation(d.elements.begin(), d.elements.end(),
                          [](const auto& a, const auto& b) { return kind_name(a) < kind_name(b); });
    EXPECT_TRUE(lti::approx_equal(compose_controller(d), ref, 1e-12));
  }
}

TEST(Controller, EmptyDesignIsUnity) {
  const auto G = compose_controller({});
  EXPECT_DOUBLE_EQ(G.dc_gain(), 1.0);
}

TEST(Controller, ElementValidation) {
  EXPECT_THROW(validate(RealPole{0.0}), std::invalid_argument);
  EXPECT_THROW(validate(RealZero{-1.0}), std::invalid_argument);
  EXPECT_THROW(validate(Integrator{-1}), std::invalid_argument);
  EXPECT_NO_THROW(validate(Gain{0.0}));
  EXPECT_EQ(kind_name(ComplexPolePair{}), "complex_pole_pair");
}

TEST(Controller, GainScalesLoopInDecibels) {
  const auto& p0 = corner_plants().front();
  auto d = baseline_controller();
  const auto base = compose_controller(d);
  d.elements.push_back(Gain{2.0});
  const auto doubled = compose_controller(d);
  for (double w : specs::FrequencyGrid()) {
    const double a = lti::to_db(std::abs(lti::freq_eval(base, w) * lti::freq_eval(p0.Gu, w)));
    const double b = lti::to_db(std::abs(lti::freq_eval(doubled, w) * lti::freq_eval(p0.Gu, w)));
    EXPECT_NEAR(b - a, 20.0 * std::log10(2.0), 1e-10);
  }
}

TEST(Controller, StabilityMarginsOfThirdOrderLag) {
  // 4 / (s + 1)^3: phase crossover at sqrt(3), |L| = 1/2 there.
  const TransferFunctiond L(Polynomiald{4.0}, Polynomiald{1.0, 3.0, 3.0, 1.0});
  const auto m = stability_margins(L);
  EXPECT_NEAR(m.phase_crossover, std::sqrt(3.0), 1e-6);
  EXPECT_NEAR(m.gain_margin_db, 20.0 * std::log10(2.0), 1e-6);
  EXPECT_NEAR(m.gain_crossover, std::sqrt(std::pow(4.0, 2.0 / 3.0) - 1.0), 1e-6);
}

TEST(Controller, CharacteristicPolynomial) {
  const auto& p = corner_plants().front();
  const auto G = compose_controller(baseline_controller());
  const auto cp = characteristic_polynomial(p, G);
  EXPECT_EQ(cp.degree(), 9);
  const auto want = p.Gu.den() * G.den() + p.Gu.num() * G.num();
  EXPECT_LT((cp.coeffs() - want.coeffs()).cwiseAbs().maxCoeff(), 1e-9 * want.max_abs_coeff());
}

TEST(Controller, BaselineDesignIsRobustlyStable) {
  const auto report = validate_design(baseline_controller(), corner_plants(), specs::TrackingSpec::published(),
                                      specs::DisturbanceSpec::published(), specs::FrequencyGrid());
  EXPECT_TRUE(report.nominal_stable);
  EXPECT_TRUE(report.robust_stable);
  EXPECT_EQ(report.unstable_plants, 0u);
  EXPECT_LT(report.nominal_closed_loop_abscissa, 0.0);
  EXPECT_GT(report.margins.phase_margin_deg, 30.0);
}

TEST(Controller, ZeroGainFailsDisturbanceAtLowFrequency) {
  const auto report = validate_design({{Gain{0.0}}}, corner_plants(), specs::TrackingSpec::published(),
                                      specs::DisturbanceSpec::published(), specs::FrequencyGrid());
  EXPECT_TRUE(report.nominal_stable);  // open-loop plant is stable
  EXPECT_FALSE(report.frequencies.front().disturbance_ok);
  EXPECT_NEAR(report.frequencies.front().worst_disturbance, 1.0, 0.05);
  EXPECT_FALSE(report.all_specs_met);
}

TEST(Controller, DirectVerdictsAgreeWithBoundOracle) {
  const auto& plants = corner_plants();
  const auto design = baseline_controller();
  const auto G = compose_controller(design);
  const auto tracking = specs::TrackingSpec::published();
  const auto dist = specs::DisturbanceSpec::published();
  const auto report = validate_design(design, plants, tracking, dist, specs::FrequencyGrid());
  for (const auto& v : report.frequencies) {
    const auto tmpl = bounds::compute_template(plants, v.omega);
    const auto g = lti::freq_eval(G, v.omega);
    const double phi = lti::nichols_phase_deg(g);
    const auto tb = bounds::tracking_bound(tmpl, tracking.W_st, {phi});
    const auto db = bounds::disturbance_bound(tmpl, dist.W_sd, {phi});
    const double mag = std::abs(g);
    if (tb.feasible[0].distance_to_endpoint(mag) > 1e-6 * mag) EXPECT_EQ(tb.feasible[0].contains(mag), v.tracking_ok) << v.omega;
    if (db.feasible[0].distance_to_endpoint(mag) > 1e-6 * mag) EXPECT_EQ(db.feasible[0].contains(mag), v.disturbance_ok) << v.omega;
  }
}

TEST(Controller, ImproperControllerCannotBeSimulated) {
  ControllerDesign d{{Gain{1.0}, RealZero{1.0}, RealZero{2.0}}};
  const auto& p = corner_plants().front();
  const Eigen::VectorXd road = Eigen::VectorXd::Zero(11);
  try {
    road::simulate_closed_loop(p, d, road, 0.1, 1.0);
    FAIL() << "expected ImproperControllerError";
  } catch (const ImproperControllerError& e) {
    EXPECT_EQ(e.relative_degree(), -2);
  }
}
