#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

#include "qft/lti/state_space.hpp"

namespace qft::lti {

/// Number of integration steps covering [0, T] at step dt.
template <typename Scalar>
Eigen::Index step_count(Scalar dt, Scalar T) {
  if (!(dt > Scalar(0))) throw std::invalid_argument("step_count: dt must be positive");
  if (T < Scalar(0)) throw std::invalid_argument("step_count: negative horizon");
  return static_cast<Eigen::Index>(std::llround(T / dt));
}

/// Classical fourth-order Runge-Kutta with zero-order-hold inputs.
///
/// `u` and `d` hold one sample per grid point t_k = k dt, k = 0..N with
/// N = round(T / dt); sample k is held over [t_k, t_k+1). Returns the
/// n x (N+1) state trajectory, column k at t_k.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> simulate_rk4(
    const StateSpace<Scalar>& ss, std::span<const Scalar> u, std::span<const Scalar> d, Scalar dt, Scalar T,
    const std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& x0 = std::nullopt) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  ss.validate();
  const Eigen::Index steps = step_count(dt, T);
  const auto samples = static_cast<std::size_t>(steps + 1);
  if (u.size() != samples || d.size() != samples) {
    throw std::invalid_argument("simulate_rk4: input length " + std::to_string(u.size()) + "/" +
                                std::to_string(d.size()) + " does not match " + std::to_string(samples) +
                                " grid samples");
  }
  const Eigen::Index n = ss.order();
  Vector x = x0.value_or(Vector::Zero(n));
  if (x.size() != n) throw std::invalid_argument("simulate_rk4: initial state size mismatch");

  Matrix out(n, steps + 1);
  out.col(0) = x;
  const Scalar half = dt / Scalar(2);
  for (Eigen::Index k = 0; k < steps; ++k) {
    const Vector forcing = ss.B_u * u[k] + ss.B_d * d[k];
    const Vector k1 = ss.A * x + forcing;
    const Vector k2 = ss.A * (x + half * k1) + forcing;
    const Vector k3 = ss.A * (x + half * k2) + forcing;
    const Vector k4 = ss.A * (x + dt * k3) + forcing;
    x += (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
    out.col(k + 1) = x;
  }
  return out;
}

}  // namespace qft::lti
