#include <gtest/gtest.h>

#include <cmath>

#include "qft/lti.hpp"

using namespace qft::lti;

namespace {

StateSpaced scalar_system(double a, double b) {
  StateSpaced ss;
  ss.A = Eigen::MatrixXd::Constant(1, 1, a);
  ss.B_u = Eigen::VectorXd::Constant(1, b);
  ss.B_d = Eigen::VectorXd::Zero(1);
  ss.C = Eigen::RowVectorXd::Ones(1);
  return ss;
}

double decay_error(double h) {
  const auto ss = scalar_system(-1.0, 0.0);
  const std::vector<double> z(static_cast<std::size_t>(step_count(h, 2.0) + 1), 0.0);
  const auto x = simulate_rk4<double>(ss, z, z, h, 2.0, Eigen::VectorXd::Ones(1));
  return std::abs(x(0, x.cols() - 1) - std::exp(-2.0));
}

}  // namespace

TEST(Rk4, SampleCountAndInitialState) {
  const auto ss = scalar_system(-1.0, 1.0);
  const std::vector<double> u(11, 0.0);
  const auto x = simulate_rk4<double>(ss, u, u, 0.1, 1.0, Eigen::VectorXd::Constant(1, 3.0));
  EXPECT_EQ(x.cols(), 11);
  EXPECT_DOUBLE_EQ(x(0, 0), 3.0);
}

TEST(Rk4, RejectsBadArguments) {
  const auto ss = scalar_system(-1.0, 1.0);
  const std::vector<double> u(11, 0.0), short_u(5, 0.0);
  EXPECT_THROW(simulate_rk4<double>(ss, short_u, u, 0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(simulate_rk4<double>(ss, u, u, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(simulate_rk4<double>(ss, u, u, 0.1, 1.0, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST(Rk4, ExponentialDecayFourthOrder) {
  const double e1 = decay_error(0.1), e2 = decay_error(0.05), e4 = decay_error(0.025);
  EXPECT_LT(e1, 1e-6);
  EXPECT_GE(std::log2(e1 / e2), 3.8);
  EXPECT_GE(std::log2(e2 / e4), 3.8);
}

TEST(Rk4, ZeroOrderHoldStepResponse) {
  // x' = -x + u, u = 1: x(t) = 1 - exp(-t).
  const auto ss = scalar_system(-1.0, 1.0);
  const std::vector<double> u(1001, 1.0), d(1001, 0.0);
  const auto x = simulate_rk4<double>(ss, u, d, 1e-3, 1.0);
  for (Eigen::Index k = 0; k < x.cols(); k += 100) EXPECT_NEAR(x(0, k), 1.0 - std::exp(-1e-3 * k), 1e-12);
}

TEST(Rk4, HarmonicOscillatorEnergyDrift) {
  StateSpaced ss;
  ss.A.resize(2, 2);
  ss.A << 0.0, 1.0, -1.0, 0.0;
  ss.B_u = ss.B_d = Eigen::VectorXd::Zero(2);
  ss.C = Eigen::RowVectorXd::Zero(2);
  const double h = 1e-2, T = 20.0 * M_PI;
  const std::vector<double> z(static_cast<std::size_t>(step_count(h, T) + 1), 0.0);
  const auto x = simulate_rk4<double>(ss, z, z, h, T, Eigen::Vector2d(1.0, 0.0));
  const double energy = x.col(x.cols() - 1).squaredNorm();
  // RK4 energy error per unit time is O(h^5).
  EXPECT_NEAR(energy, 1.0, 1e-7);
}

TEST(Rk4, DisturbanceChannelIsSeparate) {
  auto ss = scalar_system(-2.0, 0.0);
  ss.B_d = Eigen::VectorXd::Constant(1, 2.0);
  const std::vector<double> u(501, 100.0), d(501, 1.0);
  const auto x = simulate_rk4<double>(ss, u, d, 1e-2, 5.0);
  EXPECT_NEAR(x(0, x.cols() - 1), 1.0 - std::exp(-10.0), 1e-9);
}
