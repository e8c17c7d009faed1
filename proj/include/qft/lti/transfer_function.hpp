#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qft/lti/polynomial.hpp"

namespace qft::lti {

/// Raised when a transfer function is evaluated at (or numerically on top of) a pole.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// num(s) / den(s). Not required to be coprime.
template <typename Scalar>
class TransferFunction {
 public:
  using Poly = Polynomial<Scalar>;
  using Complex = std::complex<Scalar>;

  TransferFunction() : num_(Poly{Scalar(0)}), den_(Poly{Scalar(1)}) {}

  TransferFunction(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::invalid_argument("TransferFunction: zero denominator");
  }

  static TransferFunction constant(Scalar k) { return TransferFunction(Poly{k}, Poly{Scalar(1)}); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_proper() const { return num_.is_zero() || num_.degree() <= den_.degree(); }
  int relative_degree() const { return den_.degree() - (num_.is_zero() ? 0 : num_.degree()); }

  /// Same transfer function with a monic denominator.
  TransferFunction normalized() const {
    const Scalar lead = den_.leading();
    return TransferFunction(scale(num_, Scalar(1) / lead), scale(den_, Scalar(1) / lead));
  }

  /// Value at an arbitrary complex point, no singularity guard.
  Complex at(const Complex& s) const { return num_(s) / den_(s); }

  Scalar dc_gain() const {
    const Scalar d0 = den_.coeff(0);
    if (d0 == Scalar(0)) throw SingularityError("dc_gain: pole at the origin");
    return num_.coeff(0) / d0;
  }

 private:
  Poly num_;
  Poly den_;
};

using TransferFunctiond = TransferFunction<double>;

inline constexpr double kSingularityTolerance = 1e-12;

/// Frequency response num(jw)/den(jw).
///
/// Throws SingularityError when |den(jw)| is within 1e-12 of zero relative
/// to the size of its terms at that frequency.
template <typename Scalar>
std::complex<Scalar> freq_eval(const TransferFunction<Scalar>& tf, Scalar omega) {
  if (omega < Scalar(0)) throw std::invalid_argument("freq_eval: negative frequency");
  const std::complex<Scalar> s(Scalar(0), omega);
  const std::complex<Scalar> d = tf.den()(s);
  Scalar scale = 0;
  Scalar power = 1;
  for (int k = 0; k <= tf.den().degree(); ++k) {
    scale += std::abs(tf.den().coeff(k)) * power;
    power *= omega;
  }
  if (std::abs(d) <= Scalar(kSingularityTolerance) * scale) {
    throw SingularityError("freq_eval: j*omega is a pole (omega = " + std::to_string(omega) + ")");
  }
  return tf.num()(s) / d;
}

template <typename Scalar>
TransferFunction<Scalar> operator*(const TransferFunction<Scalar>& a, const TransferFunction<Scalar>& b) {
  return TransferFunction<Scalar>(a.num() * b.num(), a.den() * b.den());
}

template <typename Scalar>
TransferFunction<Scalar> operator+(const TransferFunction<Scalar>& a, const TransferFunction<Scalar>& b) {
  return TransferFunction<Scalar>(a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
}

/// Cross-multiplied coefficient comparison after making both denominators
/// monic. Tolerance is relative to the largest coefficient involved.
template <typename Scalar>
bool approx_equal(const TransferFunction<Scalar>& a, const TransferFunction<Scalar>& b, Scalar rel_tol) {
  const auto an = a.normalized();
  const auto bn = b.normalized();
  const auto lhs = an.num() * bn.den();
  const auto rhs = bn.num() * an.den();
  const int n = std::max(lhs.degree(), rhs.degree()) + 1;
  const auto l = lhs.padded(n);
  const auto r = rhs.padded(n);
  const Scalar ref = std::max({l.cwiseAbs().maxCoeff(), r.cwiseAbs().maxCoeff(), Scalar(1e-300)});
  return (l - r).cwiseAbs().maxCoeff() <= rel_tol * ref;
}

/// P G / (1 + P G), unity feedback.
template <typename Scalar>
TransferFunction<Scalar> closed_loop_tracking(const TransferFunction<Scalar>& plant,
                                              const TransferFunction<Scalar>& controller) {
  auto loop_num = plant.num() * controller.num();
  auto den = plant.den() * controller.den() + loop_num;
  if (den.is_zero()) throw std::domain_error("closed_loop_tracking: 1 + PG is identically zero");
  return TransferFunction<Scalar>(std::move(loop_num), std::move(den));
}

/// Gd / (1 + Gu G). When Gd and Gu carry the same denominator (the usual
/// case for two channels of one plant) it cancels and the result has the
/// order of the closed loop instead of twice the plant order.
template <typename Scalar>
TransferFunction<Scalar> closed_loop_disturbance(const TransferFunction<Scalar>& gd,
                                                 const TransferFunction<Scalar>& gu,
                                                 const TransferFunction<Scalar>& controller) {
  const auto loop_den = gu.den() * controller.den() + gu.num() * controller.num();
  if (loop_den.is_zero()) throw std::domain_error("closed_loop_disturbance: 1 + Gu G is identically zero");
  const bool shared = gd.den().degree() == gu.den().degree() && gd.den().coeffs() == gu.den().coeffs();
  if (shared) return TransferFunction<Scalar>(gd.num() * controller.den(), loop_den);
  return TransferFunction<Scalar>(gd.num() * gu.den() * controller.den(), gd.den() * loop_den);
}

/// Magnitude/phase coordinates of the Nichols plane.
template <typename Scalar>
struct NicholsPoint {
  Scalar phase_deg;  ///< in (-360, 0]
  Scalar mag_db;
};

/// Principal phase in degrees mapped into (-360, 0].
template <typename Scalar>
Scalar nichols_phase_deg(const std::complex<Scalar>& z) {
  Scalar deg = std::arg(z) * Scalar(180) / std::numbers::pi_v<Scalar>;
  if (deg > Scalar(0)) deg -= Scalar(360);
  return deg;
}

template <typename Scalar>
NicholsPoint<Scalar> to_nichols(const std::complex<Scalar>& z) {
  if (z == std::complex<Scalar>(0)) throw std::invalid_argument("to_nichols: zero has no phase");
  return {nichols_phase_deg(z), Scalar(20) * std::log10(std::abs(z))};
}

template <typename Scalar>
Scalar to_db(Scalar magnitude) {
  return Scalar(20) * std::log10(magnitude);
}

template <typename Scalar>
Scalar from_db(Scalar db) {
  return std::pow(Scalar(10), db / Scalar(20));
}

}  // namespace qft::lti
