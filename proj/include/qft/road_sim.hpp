#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qft/loop_shaping.hpp"
#include "qft/suspension.hpp"

namespace qft::road {

struct TwoBumps {
  double height_m = 0.05;
  double width_s = 0.5;
  double t1_s = 1.0;
  double t2_s = 5.0;
};

/// Short rectangular pulse standing in for an impulse.
struct Impulse {
  double height_m = 0.05;
  double width_s = 0.05;
  double start_s = 1.0;
};

/// Zero-mean Gaussian samples held over hold_dt_s windows.
struct WhiteNoise {
  double std_m = 0.01;
  std::uint64_t seed = 20180101;
  double hold_dt_s = 0.01;
};

/// Long pulse used for steady-state checks.
struct Step {
  double height_m = 0.05;
  double start_s = 0.0;
};

struct Custom {
  std::vector<double> samples;
};

using RoadProfile = std::variant<TwoBumps, Impulse, WhiteNoise, Step, Custom>;

std::string profile_name(const RoadProfile& p);

/// Road displacement sampled at t_k = k dt, k = 0..round(T/dt).
/// Pulses cover the half-open sample window [start, start + width).
Eigen::VectorXd generate_road(const RoadProfile& p, double dt, double T);

enum class LoopMode { kOpen, kClosed };

struct SimResult {
  LoopMode mode = LoopMode::kOpen;
  Eigen::VectorXd t;
  Eigen::VectorXd x_a;       ///< chassis displacement, m
  Eigen::VectorXd x_a_ddot;  ///< chassis acceleration, m/s^2
  Eigen::VectorXd x_t;       ///< wheel displacement, m
  Eigen::VectorXd delta_a;   ///< orifice area command
  bool plant_stable = true;
};

SimResult simulate_open_loop(const suspension::PlantInstance& plant, const Eigen::VectorXd& road, double dt, double T);

/// Raised when the controller does not stabilize the plant.
class UnstableLoopError : public std::runtime_error {
 public:
  UnstableLoopError(std::complex<double> pole);
  std::complex<double> pole() const { return pole_; }

 private:
  std::complex<double> pole_;
};

/// Plant states augmented with a controllable-canonical controller
/// realization; unity feedback with controller input reference - x_a.
lti::StateSpaced closed_loop_model(const suspension::PlantInstance& plant, const lti::TransferFunctiond& controller);

SimResult simulate_closed_loop(const suspension::PlantInstance& plant, const shaping::ControllerDesign& design,
                               const Eigen::VectorXd& road, double dt, double T, double reference = 0.0);

struct ResponseMetrics {
  double peak_disp = 0;
  double rms_disp = 0;
  double peak_accel = 0;
  double rms_accel = 0;
};

double peak_abs(const Eigen::VectorXd& v);
double rms(const Eigen::VectorXd& v);
ResponseMetrics response_metrics(const SimResult& r);

}  // namespace qft::road
