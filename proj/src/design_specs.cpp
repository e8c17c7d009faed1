#include "qft/design_specs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace qft::specs {

TrackingSpec TrackingSpec::make(double w_st, double overshoot_pct, double settle_s, double rise_s) {
  if (!(w_st > 0)) throw std::invalid_argument("TrackingSpec: W_st must be positive");
  if (!(overshoot_pct > 0 && overshoot_pct < 100)) throw std::invalid_argument("TrackingSpec: overshoot must be in (0, 100) %");
  if (!(settle_s > 0) || !(rise_s > 0)) throw std::invalid_argument("TrackingSpec: times must be positive");
  TrackingSpec s;
  s.W_st = w_st;
  s.delta_db = 20.0 * std::log10(w_st);
  s.overshoot_pct = overshoot_pct;
  s.settle_time_s = settle_s;
  s.rise_time_s = rise_s;
  return s;
}

DisturbanceSpec DisturbanceSpec::make(double w_sd) {
  if (!(w_sd > 0)) throw std::invalid_argument("DisturbanceSpec: W_sd must be positive");
  return DisturbanceSpec{w_sd};
}

FrequencyGrid::FrequencyGrid(std::vector<double> omegas) : omegas_(std::move(omegas)) {
  if (omegas_.empty()) throw std::invalid_argument("FrequencyGrid: empty");
  for (std::size_t i = 0; i < omegas_.size(); ++i) {
    if (!(omegas_[i] > 0)) throw std::invalid_argument("FrequencyGrid: frequencies must be positive");
    if (i > 0 && !(omegas_[i] > omegas_[i - 1])) throw std::invalid_argument("FrequencyGrid: must be strictly increasing");
  }
}

double damping_from_overshoot(double overshoot_pct) {
  const double l = std::log(overshoot_pct / 100.0);
  return -l / std::sqrt(std::numbers::pi * std::numbers::pi + l * l);
}

Eigen::VectorXd step_response(const lti::TransferFunctiond& tf, double dt, double T) {
  const auto ss = lti::tf_to_ss(tf);
  const auto steps = lti::step_count(dt, T);
  const std::vector<double> u(steps + 1, 1.0);
  const std::vector<double> d(steps + 1, 0.0);
  const Eigen::MatrixXd x = lti::simulate_rk4<double>(ss, u, d, dt, T);
  Eigen::VectorXd y(steps + 1);
  if (ss.order() == 0)
    y.setConstant(ss.D_u);
  else
    y = (ss.C * x).transpose().array() + ss.D_u;
  return y;
}

namespace {

// First time y crosses `level` going up, interpolated.
double first_crossing(const Eigen::VectorXd& y, double level, double dt) {
  if (y(0) >= level) return 0.0;
  for (Eigen::Index k = 1; k < y.size(); ++k) {
    if (y(k) >= level) {
      const double frac = (level - y(k - 1)) / (y(k) - y(k - 1));
      return (static_cast<double>(k - 1) + frac) * dt;
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

StepMetrics step_metrics(const lti::TransferFunctiond& tf, double dt, double T) {
  if (!tf.is_proper()) throw std::invalid_argument("step_metrics: improper transfer function");
  if (tf.den().degree() >= 1 && !lti::is_hurwitz(tf.den())) throw std::invalid_argument("step_metrics: unstable transfer function");
  StepMetrics m;
  m.dc_gain = tf.dc_gain();
  const Eigen::VectorXd y = step_response(tf, dt, T);
  const double f = m.dc_gain;
  if (f == 0.0) return m;

  // Work on the normalized response so negative DC gains behave the same.
  const Eigen::VectorXd yn = y / f;
  m.overshoot_pct = std::max(0.0, (yn.maxCoeff() - 1.0) * 100.0);
  m.rise_10_90_s = first_crossing(yn, 0.9, dt) - first_crossing(yn, 0.1, dt);

  // Last exit from the 2% band.
  const double band = 0.02;
  m.settle_2pct_s = 0.0;
  for (Eigen::Index k = yn.size() - 1; k >= 0; --k) {
    const double err = std::abs(yn(k) - 1.0);
    if (err > band) {
      if (k + 1 >= yn.size()) {
        m.settle_2pct_s = T;
      } else {
        const double e0 = err;
        const double e1 = std::abs(yn(k + 1) - 1.0);
        const double frac = (e0 - band) / (e0 - e1);
        m.settle_2pct_s = (static_cast<double>(k) + frac) * dt;
      }
      break;
    }
  }
  return m;
}

namespace {

constexpr double kEnvelopeDt = 1e-3;
constexpr double kEnvelopeHorizon = 20.0;
constexpr double kDominanceHorizon = 10.0;
constexpr double kDominanceTol = 0.0;  // strict; the tail gap near p = zeta wn is O(1e-9)

lti::TransferFunctiond second_order(double zeta, double wn) {
  return {lti::Polynomiald{wn * wn}, lti::Polynomiald{1.0, 2.0 * zeta * wn, wn * wn}};
}

lti::TransferFunctiond with_lag(const lti::TransferFunctiond& core, double p) {
  return core * lti::TransferFunctiond(lti::Polynomiald{p}, lti::Polynomiald{1.0, p});
}

bool dominates(const Eigen::VectorXd& upper, const Eigen::VectorXd& lower, Eigen::Index samples) {
  for (Eigen::Index k = 0; k < samples; ++k)
    if (upper(k) < lower(k) - kDominanceTol) return false;
  return true;
}

// Largest p in [lo, hi] with pred(p) true, assuming pred(lo) holds and the
// predicate is monotone (true below a threshold).
template <typename Pred>
double bisect_largest(double lo, double hi, Pred pred) {
  for (int it = 0; it < 60 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

// Smallest p in [lo, hi] with pred(p) true, assuming pred(hi) holds and
// pred is true above a threshold.
template <typename Pred>
double bisect_smallest(double lo, double hi, Pred pred) {
  for (int it = 0; it < 60 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

EnvelopePair synthesize_envelopes(const TrackingSpec& spec) {
  EnvelopePair env;
  env.zeta = damping_from_overshoot(spec.overshoot_pct);
  env.omega_n = 4.0 / (env.zeta * spec.settle_time_s);
  env.upper = second_order(env.zeta, env.omega_n);

  const auto rise_of = [&](double p) { return step_metrics(with_lag(env.upper, p), kEnvelopeDt, kEnvelopeHorizon).rise_10_90_s; };
  const auto settle_of = [&](double p) { return step_metrics(with_lag(env.upper, p), kEnvelopeDt, kEnvelopeHorizon).settle_2pct_s; };

  // Slow poles lengthen the rise time; fast poles shorten settling.
  const double p_min = 1e-3 * env.omega_n;
  const double p_max = 1e3 * env.omega_n;
  if (rise_of(p_min) < spec.rise_time_s) throw SpecConflictError("synthesize_envelopes: rise time target unreachable");
  const double p_rise = bisect_largest(p_min, p_max, [&](double p) { return rise_of(p) >= spec.rise_time_s; });
  if (settle_of(p_max) > kLowerSettleLimit) throw SpecConflictError("synthesize_envelopes: settling limit unreachable");
  const double p_settle = bisect_smallest(p_min, p_max, [&](double p) { return settle_of(p) <= kLowerSettleLimit; });
  if (p_settle > p_rise) {
    throw SpecConflictError("synthesize_envelopes: no lower-model pole gives rise >= " + std::to_string(spec.rise_time_s) +
                            " s with settling <= " + std::to_string(kLowerSettleLimit) + " s");
  }

  const Eigen::VectorXd upper_step = step_response(env.upper, kEnvelopeDt, kDominanceHorizon);
  const auto samples = upper_step.size();
  const auto ordered = [&](double p) {
    return dominates(upper_step, step_response(with_lag(env.upper, p), kEnvelopeDt, kDominanceHorizon), samples);
  };
  if (!ordered(p_settle)) throw SpecConflictError("synthesize_envelopes: lower model overtakes the upper model");
  env.lower_pole = ordered(p_rise) ? p_rise : bisect_largest(p_settle, p_rise, ordered);
  env.lower = with_lag(env.upper, env.lower_pole);
  return env;
}

}  // namespace qft::specs
