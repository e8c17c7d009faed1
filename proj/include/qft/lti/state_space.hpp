#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "qft/lti/transfer_function.hpp"

namespace qft::lti {

enum class Channel { kControl, kDisturbance };

/// Single-output model with a control and a disturbance input:
///
///   x' = A x + B_u u + B_d d
///   y  = C x + D_u u + D_d d
///
/// Order 0 is allowed so that static gains have a realization.
template <typename Scalar>
struct StateSpace {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  Matrix A;
  Vector B_u;
  Vector B_d;
  RowVector C;
  Scalar D_u = 0;
  Scalar D_d = 0;

  Eigen::Index order() const { return A.rows(); }

  const Vector& input(Channel ch) const { return ch == Channel::kControl ? B_u : B_d; }
  Scalar feedthrough(Channel ch) const { return ch == Channel::kControl ? D_u : D_d; }

  void validate() const {
    const auto n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("StateSpace: A must be square");
    if (B_u.size() != n || B_d.size() != n) throw std::invalid_argument("StateSpace: input vector size mismatch");
    if (C.size() != n) throw std::invalid_argument("StateSpace: output row size mismatch");
  }
};

using StateSpaced = StateSpace<double>;

/// Characteristic polynomial and adjugate of (sI - A) by the
/// Faddeev-LeVerrier recursion:
///   N_1 = I,  c_k = -tr(A N_k) / k,  N_{k+1} = A N_k + c_k I
/// so that adj(sI - A) = sum_k N_k s^(n-k).
template <typename Scalar>
TransferFunction<Scalar> ss_to_tf(const StateSpace<Scalar>& ss, Channel channel) {
  using Matrix = typename StateSpace<Scalar>::Matrix;
  using Coeffs = typename Polynomial<Scalar>::Coeffs;
  ss.validate();
  const Eigen::Index n = ss.order();
  const auto& b = ss.input(channel);
  const Scalar d = ss.feedthrough(channel);

  Coeffs charpoly = Coeffs::Zero(n + 1);
  Coeffs numerator = Coeffs::Zero(n + 1);
  charpoly(0) = Scalar(1);
  Matrix N = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    numerator(k) = (ss.C * N * b).value();
    const Matrix AN = ss.A * N;
    charpoly(k) = -AN.trace() / Scalar(k);
    N = AN;
    N.diagonal().array() += charpoly(k);
  }
  numerator += d * charpoly;
  return TransferFunction<Scalar>(Polynomial<Scalar>(numerator), Polynomial<Scalar>(charpoly));
}

/// Controllable canonical realization of a proper transfer function.
/// The realization occupies the control channel; the disturbance channel
/// is zero.
template <typename Scalar>
StateSpace<Scalar> tf_to_ss(const TransferFunction<Scalar>& tf) {
  using SS = StateSpace<Scalar>;
  if (!tf.is_proper()) {
    throw std::invalid_argument("tf_to_ss: improper transfer function (relative degree " +
                                std::to_string(tf.relative_degree()) + ")");
  }
  const auto monic = tf.normalized();
  const int n = monic.den().degree();
  const auto den = monic.den().coeffs();  // 1, a1, ..., an
  const auto num = monic.num().padded(n + 1);  // b0, b1, ..., bn

  SS ss;
  ss.A = SS::Matrix::Zero(n, n);
  ss.B_u = SS::Vector::Zero(n);
  ss.B_d = SS::Vector::Zero(n);
  ss.C = SS::RowVector::Zero(n);
  ss.D_u = num(0);
  ss.D_d = 0;
  if (n == 0) return ss;

  // Strictly proper remainder: num - b0 * den.
  for (int i = 0; i < n - 1; ++i) ss.A(i, i + 1) = Scalar(1);
  for (int j = 0; j < n; ++j) ss.A(n - 1, j) = -den(n - j);
  ss.B_u(n - 1) = Scalar(1);
  for (int j = 0; j < n; ++j) ss.C(j) = num(n - j) - num(0) * den(n - j);
  return ss;
}

/// C (jwI - A)^-1 B + D by a direct complex solve.
template <typename Scalar>
std::complex<Scalar> resolvent_response(const StateSpace<Scalar>& ss, Channel channel, Scalar omega) {
  using Complex = std::complex<Scalar>;
  using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  const auto n = ss.order();
  if (n == 0) return Complex(ss.feedthrough(channel));
  CMatrix M = -ss.A.template cast<Complex>();
  M.diagonal().array() += Complex(0, omega);
  const CVector x = M.partialPivLu().solve(ss.input(channel).template cast<Complex>());
  return (ss.C.template cast<Complex>() * x)(0) + ss.feedthrough(channel);
}

}  // namespace qft::lti
