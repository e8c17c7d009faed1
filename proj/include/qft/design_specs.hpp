#pragma once

#include <stdexcept>
#include <vector>

#include "qft/lti.hpp"

namespace qft::specs {

/// Raised when the time-domain targets cannot be met by the envelope family.
class SpecConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Robust tracking target: |G P / (1 + G P)| <= W_st for every plant.
struct TrackingSpec {
  double W_st = 1.2;
  double delta_db = 0.0;  ///< 20 log10(W_st), filled by make()
  double overshoot_pct = 5.0;
  double settle_time_s = 3.0;  ///< 2% band
  double rise_time_s = 1.7;    ///< 10-90%

  static TrackingSpec make(double w_st, double overshoot_pct, double settle_s, double rise_s);
  static TrackingSpec published() { return make(1.2, 5.0, 3.0, 1.7); }
};

/// Robust disturbance rejection: |Gd / (1 + Gu G)| <= W_sd.
struct DisturbanceSpec {
  double W_sd = 0.4;

  static DisturbanceSpec make(double w_sd);
  static DisturbanceSpec published() { return make(0.4); }
};

class FrequencyGrid {
 public:
  FrequencyGrid() : FrequencyGrid(default_values()) {}
  explicit FrequencyGrid(std::vector<double> omegas);

  static std::vector<double> default_values() { return {0.1, 0.5, 1, 2, 5, 8, 12, 20, 50, 100}; }

  const std::vector<double>& values() const { return omegas_; }
  std::size_t size() const { return omegas_.size(); }
  double operator[](std::size_t i) const { return omegas_[i]; }
  auto begin() const { return omegas_.begin(); }
  auto end() const { return omegas_.end(); }

 private:
  std::vector<double> omegas_;
};

struct EnvelopePair {
  lti::TransferFunctiond upper;
  lti::TransferFunctiond lower;
  double zeta = 0;
  double omega_n = 0;
  double lower_pole = 0;  ///< extra real pole of the lower model (rad/s)
};

/// Damping ratio giving the requested percent overshoot for a pure second-order system.
double damping_from_overshoot(double overshoot_pct);

/// Upper model: wn^2 / (s^2 + 2 zeta wn s + wn^2) with zeta from the
/// overshoot and wn from ts = 4 / (zeta wn). Lower model: the same core
/// times p / (s + p), with p the largest value meeting rise >= target,
/// settle <= 3.5 s and upper >= lower on [0, 10 s].
EnvelopePair synthesize_envelopes(const TrackingSpec& spec);

inline constexpr double kLowerSettleLimit = 3.5;

struct StepMetrics {
  double overshoot_pct = 0;
  double rise_10_90_s = 0;
  double settle_2pct_s = 0;
  double dc_gain = 0;
};

/// Unit-step response of a stable proper transfer function, simulated with
/// RK4 over [0, T]. Crossing times are linearly interpolated between
/// samples; the final value is the analytic DC gain.
StepMetrics step_metrics(const lti::TransferFunctiond& tf, double dt, double T);

/// Sampled unit-step output y(t_k), k = 0..round(T/dt).
Eigen::VectorXd step_response(const lti::TransferFunctiond& tf, double dt, double T);

}  // namespace qft::specs
