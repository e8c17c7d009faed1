#include <gtest/gtest.h>

#include <random>

#include "qft/bounds.hpp"

using namespace qft;
using namespace qft::bounds;

namespace {

Template single(Complex gu, Complex gd = {1.0, 0.0}) {
  Template t;
  t.omega = 1.0;
  t.gu = {gu};
  t.gd = {gd};
  return t;
}

Complex random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lm(-1.0, 1.0), ph(-M_PI, M_PI);
  return std::polar(std::pow(10.0, lm(rng)), ph(rng));
}

GainSet random_set(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Interval> iv;
  const int n = static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i) {
    const double a = u(rng), b = u(rng);
    iv.push_back({std::min(a, b), rng() % 5 == 0 ? kInf : std::max(a, b)});
  }
  return GainSet(iv);
}

}  // namespace

TEST(GainSet, NormalizesAndMerges) {
  const GainSet s({{3.0, 4.0}, {-1.0, 1.0}, {0.5, 2.0}, {5.0, 4.0}});
  ASSERT_EQ(s.intervals().size(), 2u);
  EXPECT_EQ(s.intervals()[0], (Interval{0.0, 2.0}));
  EXPECT_EQ(s.intervals()[1], (Interval{3.0, 4.0}));
  EXPECT_TRUE(GainSet::all().contains(1e300));
  EXPECT_FALSE(GainSet::empty().contains(0.0));
  EXPECT_DOUBLE_EQ(s.distance_to_endpoint(2.5), 0.5);
}

TEST(GainSet, IntersectionAlgebra) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_set(rng), b = random_set(rng), c = random_set(rng);
    EXPECT_EQ(a.intersect(b), b.intersect(a));
    EXPECT_EQ(a.intersect(b).intersect(c), a.intersect(b.intersect(c)));
    EXPECT_EQ(a.intersect(GainSet::all()), a);
    EXPECT_TRUE(a.intersect(GainSet::empty()).is_empty());
  }
}

TEST(Bounds, TrackingHandCase) {
  // |p| = 1 at -180 deg, W = 1.2: gains in (0, 6/11] or [6, inf).
  const auto s = tracking_feasible({1.0, 0.0}, 1.2, 180.0);
  ASSERT_EQ(s.intervals().size(), 2u);
  EXPECT_NEAR(s.intervals()[0].hi, 6.0 / 11.0, 1e-12);
  EXPECT_NEAR(s.intervals()[1].lo, 6.0, 1e-12);
  EXPECT_EQ(s.intervals()[1].hi, kInf);
  EXPECT_FALSE(s.contains(1.0));
}

TEST(Bounds, DisturbanceHandCases) {
  const auto a = disturbance_feasible({1.0, 0.0}, {1.0, 0.0}, 0.4, 180.0);
  ASSERT_EQ(a.intervals().size(), 1u);
  EXPECT_NEAR(a.intervals()[0].lo, 3.5, 1e-12);
  const auto b = disturbance_feasible({1.0, 0.0}, {1.0, 0.0}, 0.4, 0.0);
  ASSERT_EQ(b.intervals().size(), 1u);
  EXPECT_NEAR(b.intervals()[0].lo, 1.5, 1e-12);
  // No control authority: infeasible whenever |Gd| > W.
  EXPECT_TRUE(disturbance_feasible({1.0, 0.0}, {0.0, 0.0}, 0.4, -90.0).is_empty());
  EXPECT_TRUE(disturbance_feasible({0.1, 0.0}, {0.0, 0.0}, 0.4, -90.0).is_all());
}

TEST(Bounds, ClosedFormMatchesOracle) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> phase(-360.0, 0.0), gain(0.0, 20.0);
  for (int i = 0; i < 5000; ++i) {
    const auto t = single(random_point(rng), random_point(rng));
    const double phi = phase(rng), g = gain(rng);
    const auto ts = tracking_feasible(t.gu[0], 1.2, phi);
    const auto ds = disturbance_feasible(t.gd[0], t.gu[0], 0.4, phi);
    if (ts.distance_to_endpoint(g) > 1e-9) EXPECT_EQ(ts.contains(g), feasible_oracle(t, SpecKind::kTracking, 1.2, phi, g));
    if (ds.distance_to_endpoint(g) > 1e-9) EXPECT_EQ(ds.contains(g), feasible_oracle(t, SpecKind::kDisturbance, 0.4, phi, g));
  }
}

TEST(Bounds, LargerWeightNeverShrinks) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> phase(-360.0, 0.0), gain(0.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const Complex p = random_point(rng), d = random_point(rng);
    const double phi = phase(rng), g = gain(rng);
    if (tracking_feasible(p, 1.1, phi).contains(g)) EXPECT_TRUE(tracking_feasible(p, 1.5, phi).contains(g));
    if (disturbance_feasible(d, p, 0.3, phi).contains(g)) EXPECT_TRUE(disturbance_feasible(d, p, 0.6, phi).contains(g));
  }
}

TEST(Bounds, AddingPlantNeverEnlarges) {
  std::mt19937_64 rng(23);
  const auto phases = default_phase_grid(15.0);
  for (int i = 0; i < 50; ++i) {
    Template t = single(random_point(rng), random_point(rng));
    const auto before = tracking_bound(t, 1.2, phases);
    t.gu.push_back(random_point(rng));
    t.gd.push_back(random_point(rng));
    const auto after = tracking_bound(t, 1.2, phases);
    for (std::size_t k = 0; k < phases.size(); ++k) EXPECT_EQ(after.feasible[k].intersect(before.feasible[k]), after.feasible[k]);
  }
}

TEST(Bounds, PhaseGridAndWrap) {
  const auto g = default_phase_grid();
  ASSERT_EQ(g.size(), 73u);
  EXPECT_DOUBLE_EQ(g.front(), -360.0);
  EXPECT_DOUBLE_EQ(g.back(), 0.0);
  EXPECT_DOUBLE_EQ(wrap_phase_deg(-370.0), -10.0);
  EXPECT_DOUBLE_EQ(wrap_phase_deg(30.0), -330.0);
  EXPECT_DOUBLE_EQ(wrap_phase_deg(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_phase_deg(-360.0), -360.0);
}

TEST(Bounds, ShiftIsExactlyInvertible) {
  std::mt19937_64 rng(31);
  const auto b = tracking_bound(single(random_point(rng)), 1.2, default_phase_grid());
  const auto lb = shift_bound(b, -123.0, 17.25);
  for (std::size_t i = 0; i < b.phases_deg.size(); ++i) {
    const auto& iv = b.feasible[i].intervals();
    ASSERT_EQ(lb.points[i].lo_db.size(), iv.size());
    for (std::size_t k = 0; k < iv.size(); ++k) {
      if (iv[k].lo > 0) EXPECT_NEAR(lb.points[i].lo_db[k] - 17.25, lti::to_db(iv[k].lo), 1e-12);
      if (std::isfinite(iv[k].hi)) EXPECT_NEAR(lb.points[i].hi_db[k] - 17.25, lti::to_db(iv[k].hi), 1e-12);
    }
    const double back = std::remainder(lb.points[i].loop_phase_deg + 123.0 - b.phases_deg[i], 360.0);
    EXPECT_NEAR(back, 0.0, 1e-12);
  }
}

TEST(Bounds, IntersectRequiresMatchingGrids) {
  const auto t = single({1.0, 0.0});
  const auto a = tracking_bound(t, 1.2, default_phase_grid(5.0));
  const auto b = tracking_bound(t, 1.2, default_phase_grid(10.0));
  EXPECT_THROW(intersect_bounds({a, b}), std::invalid_argument);
  const auto c = intersect_bounds({a, disturbance_bound(t, 0.4, default_phase_grid(5.0))});
  EXPECT_EQ(c.kind, SpecKind::kIntersection);
}

TEST(Bounds, SpecKindStrings) {
  for (auto k : {SpecKind::kTracking, SpecKind::kDisturbance, SpecKind::kIntersection})
    EXPECT_EQ(spec_kind_from_string(to_string(k)), k);
  EXPECT_THROW(spec_kind_from_string("bogus"), std::invalid_argument);
}

TEST(Bounds, PublishedSetCoversDefaultGrid) {
  const auto plants = suspension::sample_plants(suspension::UncertaintySet{}, 2);
  const auto all = compute_all_bounds(plants, specs::FrequencyGrid(), specs::TrackingSpec::published(),
                                      specs::DisturbanceSpec::published(), default_phase_grid());
  ASSERT_EQ(all.size(), 10u);
  for (const auto& fb : all) {
    EXPECT_EQ(fb.tmpl.size(), plants.size());
    EXPECT_GE(template_spread_db(fb.tmpl), 0.0);
  }
  EXPECT_THROW(compute_template(plants, -1.0), std::invalid_argument);
}
