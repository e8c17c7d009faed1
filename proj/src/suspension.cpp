#include "qft/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qft::suspension {

void PlantParams::validate() const {
  if (!(m_a > 0) || !(m_t > 0) || !(K_t > 0)) throw std::invalid_argument("PlantParams: masses and K_t must be positive");
  if (C_a < 0 || C_t < 0) throw std::invalid_argument("PlantParams: damping must be non-negative");
  if (!(S2 > 0)) throw std::invalid_argument("PlantParams: S2 must be positive");
}

void UncertaintySet::validate() const {
  nominal.validate();
  const auto& h = half_ranges;
  if (h.m_a < 0 || h.m_t < 0 || h.C_a < 0 || h.C_t < 0 || h.K_t < 0) {
    throw std::invalid_argument("UncertaintySet: half ranges must be non-negative");
  }
  PlantParams low = nominal;
  low.m_a -= h.m_a;
  low.m_t -= h.m_t;
  low.C_a -= h.C_a;
  low.C_t -= h.C_t;
  low.K_t -= h.K_t;
  try {
    low.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("UncertaintySet: lower corner invalid: ") + e.what());
  }
}

lti::StateSpaced build_state_space(const PlantParams& p) {
  p.validate();
  lti::StateSpaced ss;
  ss.A.setZero(5, 5);
  ss.A(0, 1) = 1.0;
  ss.A.row(1) << p.Q1, -(p.C_a / p.m_a), -p.Q1, p.C_a / p.m_a, p.Q2;
  ss.A(2, 3) = 1.0;
  ss.A.row(3) << p.P1, p.C_a / p.m_t, -(p.P1 + p.K_t / p.m_t), -((p.C_t + p.C_a) / p.m_t), p.P2;
  ss.A.row(4) << p.S1, 0.0, -p.S1, 0.0, -p.S2;
  ss.B_u.setZero(5);
  ss.B_u(4) = p.S3;
  ss.B_d.setZero(5);
  ss.B_d(3) = p.K_t / p.m_t;
  ss.C.setZero(5);
  ss.C(0) = 1.0;
  ss.D_u = 0.0;
  ss.D_d = 0.0;
  return ss;
}

PlantTfs derive_plant_tfs(const lti::StateSpaced& ss) {
  if (ss.order() != 5) throw std::invalid_argument("derive_plant_tfs: expected the five-state suspension model");
  return {lti::ss_to_tf(ss, lti::Channel::kControl), lti::ss_to_tf(ss, lti::Channel::kDisturbance)};
}

PlantInstance make_instance(const PlantParams& p, bool is_nominal) {
  PlantInstance inst;
  inst.params = p;
  inst.ss = build_state_space(p);
  auto tfs = derive_plant_tfs(inst.ss);
  inst.Gu = std::move(tfs.Gu);
  inst.Gd = std::move(tfs.Gd);
  inst.is_nominal = is_nominal;
  return inst;
}

namespace {

std::vector<double> levels_around(double nominal, double half, int levels) {
  if (levels == 1) return {nominal};
  std::vector<double> v(levels);
  for (int i = 0; i < levels; ++i) v[i] = nominal - half + 2.0 * half * i / (levels - 1);
  return v;
}

}  // namespace

std::vector<PlantInstance> sample_plants(const UncertaintySet& u, int levels) {
  if (levels < 1) throw std::invalid_argument("sample_plants: levels must be >= 1");
  u.validate();
  const auto& n = u.nominal;
  const auto& h = u.half_ranges;
  const auto ma = levels_around(n.m_a, h.m_a, levels);
  const auto mt = levels_around(n.m_t, h.m_t, levels);
  const auto ca = levels_around(n.C_a, h.C_a, levels);
  const auto ct = levels_around(n.C_t, h.C_t, levels);
  const auto kt = levels_around(n.K_t, h.K_t, levels);

  std::vector<PlantInstance> out;
  out.push_back(make_instance(n, true));
  if (levels == 1) return out;

  const int centre = (levels % 2 == 1) ? levels / 2 : -1;
  for (int i0 = 0; i0 < levels; ++i0)
    for (int i1 = 0; i1 < levels; ++i1)
      for (int i2 = 0; i2 < levels; ++i2)
        for (int i3 = 0; i3 < levels; ++i3)
          for (int i4 = 0; i4 < levels; ++i4) {
            if (i0 == centre && i1 == centre && i2 == centre && i3 == centre && i4 == centre) continue;
            PlantParams p = n;
            p.m_a = ma[i0];
            p.m_t = mt[i1];
            p.C_a = ca[i2];
            p.C_t = ct[i3];
            p.K_t = kt[i4];
            out.push_back(make_instance(p, false));
          }
  return out;
}

std::size_t nominal_index(const std::vector<PlantInstance>& plants) {
  for (std::size_t i = 0; i < plants.size(); ++i)
    if (plants[i].is_nominal) return i;
  throw std::invalid_argument("nominal_index: no nominal instance");
}

PublishedIntervals PublishedIntervals::published() {
  const auto interval = [](std::string name, CoeffFamily f, int idx, double lo, double hi) {
    return PublishedCoefficient{std::move(name), f, idx, lo, hi, false};
  };
  const auto fixed = [](std::string name, CoeffFamily f, int idx, double v) {
    return PublishedCoefficient{std::move(name), f, idx, v, v, true};
  };
  using F = CoeffFamily;
  PublishedIntervals p;
  p.coefficients = {
      interval("a1", F::kGd, 1, -1.82e-12, 3.64e-12),
      interval("a2", F::kGd, 2, -2.47e-10, 3.49e-10),
      interval("a3", F::kGd, 3, 2500, 4688),
      interval("a4", F::kGd, 4, 7.04e6, 12.25e6),
      fixed("a5", F::kGd, 5, 6.76e6),
      interval("b1", F::kDen, 1, 2414, 2428),
      interval("b2", F::kDen, 2, 8.92e4, 12.28e4),
      interval("b3", F::kDen, 3, 21.98e6, 22.04e6),
      interval("b4", F::kDen, 4, 7.08e6, 12.3e6),
      fixed("b5", F::kDen, 5, 6.76e6),
      interval("c1", F::kGu, 1, -3.64e-12, 3.18e-12),
      interval("c2", F::kGu, 2, -1.89e-10, 4.08e-10),
      fixed("c3", F::kGu, 3, 3.52e5),
      interval("c4", F::kGu, 4, 1.31e7, 1.90e7),
      fixed("c5", F::kGu, 5, 3.25e9),
  };
  return p;
}

const CoefficientCheck& IntervalReport::at(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("IntervalReport: no coefficient " + name);
}

double coefficient(const PlantInstance& plant, CoeffFamily family, int index) {
  if (index < 1 || index > 5) throw std::out_of_range("coefficient: index must be 1..5");
  const int power = 5 - index;
  switch (family) {
    case CoeffFamily::kGd:
      return plant.Gd.num().coeff(power) / plant.Gd.den().leading();
    case CoeffFamily::kGu:
      return plant.Gu.num().coeff(power) / plant.Gu.den().leading();
    case CoeffFamily::kDen:
      return plant.Gu.den().coeff(power) / plant.Gu.den().leading();
  }
  return 0.0;
}

namespace {

double family_scale(const PlantInstance& plant, CoeffFamily family) {
  switch (family) {
    case CoeffFamily::kGd:
      return plant.Gd.num().max_abs_coeff() / std::abs(plant.Gd.den().leading());
    case CoeffFamily::kGu:
      return plant.Gu.num().max_abs_coeff() / std::abs(plant.Gu.den().leading());
    case CoeffFamily::kDen:
      return plant.Gu.den().max_abs_coeff() / std::abs(plant.Gu.den().leading());
  }
  return 0.0;
}

// A published coefficient is numerical residue when it is tiny next to the
// other published coefficients of the same polynomial.
bool published_as_residue(const PublishedIntervals& ref, const PublishedCoefficient& c) {
  double largest = 0.0;
  for (const auto& o : ref.coefficients)
    if (o.family == c.family) largest = std::max({largest, std::abs(o.lo), std::abs(o.hi)});
  return std::max(std::abs(c.lo), std::abs(c.hi)) < kNoiseFloor * largest;
}

}  // namespace

IntervalReport check_published_intervals(const std::vector<PlantInstance>& plants, const PublishedIntervals& ref) {
  if (plants.empty()) throw std::invalid_argument("check_published_intervals: no plants");
  const PlantInstance& nominal = plants[nominal_index(plants)];

  IntervalReport report;
  report.pass = true;
  for (const auto& pc : ref.coefficients) {
    CoefficientCheck c;
    c.name = pc.name;
    c.published_lo = pc.lo;
    c.published_hi = pc.hi;
    c.fixed = pc.fixed;
    c.computed_min = std::numeric_limits<double>::infinity();
    c.computed_max = -std::numeric_limits<double>::infinity();
    bool all_below_floor = true;
    for (const auto& p : plants) {
      const double v = coefficient(p, pc.family, pc.index);
      c.computed_min = std::min(c.computed_min, v);
      c.computed_max = std::max(c.computed_max, v);
      if (!(std::abs(v) < kNoiseFloor * family_scale(p, pc.family))) all_below_floor = false;
    }
    c.nominal = coefficient(nominal, pc.family, pc.index);
    c.near_zero = published_as_residue(ref, pc);

    const double slack_lo = pc.lo - kRangeSlack * std::abs(pc.lo);
    const double slack_hi = pc.hi + kRangeSlack * std::abs(pc.hi);
    if (c.near_zero) {
      c.nominal_ok = std::abs(c.nominal) < kNoiseFloor * family_scale(nominal, pc.family);
      c.range_intersects = all_below_floor || (c.computed_max >= pc.lo && c.computed_min <= pc.hi);
      c.range_within_slack = all_below_floor;
      c.note = "published value is numerical residue; judged by the noise-floor rule";
    } else {
      // A printed single value stands for the interval of its rounding.
      const double lo = pc.fixed ? pc.lo - kFixedTolerance * std::abs(pc.lo) : pc.lo;
      const double hi = pc.fixed ? pc.hi + kFixedTolerance * std::abs(pc.hi) : pc.hi;
      c.range_intersects = c.computed_max >= lo && c.computed_min <= hi;
      c.range_within_slack = c.computed_min >= slack_lo && c.computed_max <= slack_hi;
      if (pc.fixed) {
        c.nominal_rel_error = std::abs(c.nominal - pc.lo) / std::abs(pc.lo);
        c.nominal_ok = c.nominal_rel_error <= kFixedTolerance;
      } else {
        c.nominal_ok = c.nominal > pc.lo && c.nominal < pc.hi;
      }
    }

    if (!c.range_within_slack) {
      std::ostringstream msg;
      msg.precision(6);
      msg << c.name << ": computed range [" << c.computed_min << ", " << c.computed_max
          << "] exceeds the published ";
      if (pc.fixed)
        msg << "value " << pc.lo;
      else
        msg << "interval [" << pc.lo << ", " << pc.hi << "]";
      msg << " by more than " << kRangeSlack * 100 << "%";
      if (pc.fixed && pc.family == CoeffFamily::kDen && pc.index == 5)
        msg << " (b5 = det(-A) scales with K_t/m_t, which varies with m_t)";
      if (c.note.empty()) c.note = "range discrepancy flagged";
      report.discrepancies.push_back(msg.str());
    }
    if (!c.nominal_ok || !c.range_intersects) report.pass = false;
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace qft::suspension
