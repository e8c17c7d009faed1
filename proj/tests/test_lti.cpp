#include <gtest/gtest.h>

#include <random>

#include "qft/lti.hpp"

using namespace qft::lti;
using C = std::complex<double>;

namespace {

StateSpaced random_system(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  StateSpaced ss;
  ss.A = Eigen::MatrixXd::NullaryExpr(n, n, [&]() { return g(rng); });
  ss.A -= (ss.A.eigenvalues().real().maxCoeff() + 1.0) * Eigen::MatrixXd::Identity(n, n);
  ss.B_u = Eigen::VectorXd::NullaryExpr(n, [&]() { return g(rng); });
  ss.B_d = Eigen::VectorXd::NullaryExpr(n, [&]() { return g(rng); });
  ss.C = Eigen::RowVectorXd::NullaryExpr(n, [&]() { return g(rng); });
  ss.D_u = g(rng);
  ss.D_d = 0.0;
  return ss;
}

}  // namespace

TEST(TransferFunction, RejectsZeroDenominator) {
  EXPECT_THROW(TransferFunctiond(Polynomiald{1.0}, Polynomiald{0.0}), std::invalid_argument);
}

TEST(TransferFunction, FreqEvalMatchesDirectFormula) {
  const TransferFunctiond tf(Polynomiald{1.0}, Polynomiald{1.0, 1.0});
  const C z = freq_eval(tf, 1.0);
  EXPECT_NEAR(z.real(), 0.5, 1e-15);
  EXPECT_NEAR(z.imag(), -0.5, 1e-15);
  EXPECT_THROW(freq_eval(tf, -1.0), std::invalid_argument);
}

TEST(TransferFunction, FreqEvalOnPoleThrows) {
  const TransferFunctiond integrator(Polynomiald{1.0}, Polynomiald{1.0, 0.0});
  EXPECT_THROW(freq_eval(integrator, 0.0), SingularityError);
  const TransferFunctiond osc(Polynomiald{1.0}, Polynomiald{1.0, 0.0, 4.0});
  EXPECT_THROW(freq_eval(osc, 2.0), SingularityError);
  EXPECT_NO_THROW(freq_eval(osc, 2.1));
}

TEST(TransferFunction, ClosedLoopTracking) {
  const TransferFunctiond P(Polynomiald{1.0}, Polynomiald{1.0, 1.0});
  const TransferFunctiond G = TransferFunctiond::constant(3.0);
  const auto T = closed_loop_tracking(P, G);
  EXPECT_NEAR(T.dc_gain(), 0.75, 1e-15);
  for (double w : {0.1, 1.0, 10.0}) {
    const C L = freq_eval(G, w) * freq_eval(P, w);
    EXPECT_NEAR(std::abs(freq_eval(T, w) - L / (1.0 + L)), 0.0, 1e-14);
  }
}

TEST(TransferFunction, ClosedLoopDisturbanceSharedDenominator) {
  const Polynomiald den{1.0, 3.0, 2.0};
  const TransferFunctiond Gd(Polynomiald{2.0}, den), Gu(Polynomiald{1.0, 5.0}, den);
  const TransferFunctiond G(Polynomiald{4.0}, Polynomiald{1.0, 4.0});
  const auto S = closed_loop_disturbance(Gd, Gu, G);
  for (double w : {0.01, 0.7, 30.0}) {
    const C want = freq_eval(Gd, w) / (1.0 + freq_eval(Gu, w) * freq_eval(G, w));
    EXPECT_LT(std::abs(freq_eval(S, w) - want) / std::abs(want), 1e-13);
  }
}

TEST(TransferFunction, NicholsConvention) {
  EXPECT_DOUBLE_EQ(nichols_phase_deg(C(-1.0, 0.0)), -180.0);
  EXPECT_DOUBLE_EQ(nichols_phase_deg(C(1.0, 0.0)), 0.0);
  EXPECT_NEAR(nichols_phase_deg(C(0.0, 1.0)), -270.0, 1e-12);
  EXPECT_NEAR(nichols_phase_deg(C(0.0, -1.0)), -90.0, 1e-12);
  const auto np = to_nichols(C(10.0, 0.0));
  EXPECT_NEAR(np.mag_db, 20.0, 1e-12);
  EXPECT_THROW(to_nichols(C(0.0, 0.0)), std::invalid_argument);
  EXPECT_NEAR(from_db(to_db(0.37)), 0.37, 1e-15);
}

TEST(StateSpace, TfRoundTripOnRandomProperSystems) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<double> den(n + 1), num(n + 1);
    den[0] = 1.0 + std::abs(u(rng));
    for (int i = 1; i <= n; ++i) den[i] = u(rng);
    for (int i = 0; i <= n; ++i) num[i] = u(rng);
    const TransferFunctiond tf{Polynomiald(num), Polynomiald(den)};
    const auto back = ss_to_tf(tf_to_ss(tf), Channel::kControl);
    EXPECT_TRUE(approx_equal(tf, back, 1e-9)) << "trial " << trial;
  }
}

TEST(StateSpace, TfToSsRejectsImproper) {
  const TransferFunctiond improper(Polynomiald{1.0, 0.0, 0.0}, Polynomiald{1.0, 1.0});
  try {
    tf_to_ss(improper);
    FAIL() << "expected throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("-1"), std::string::npos);
  }
}

TEST(StateSpace, ResolventOracleAgreesWithTransferFunction) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ss = random_system(rng, 1 + trial % 7);
    for (auto ch : {Channel::kControl, Channel::kDisturbance}) {
      const auto tf = ss_to_tf(ss, ch);
      for (double w : {0.0, 0.3, 2.0, 40.0}) {
        const C a = freq_eval(tf, w);
        const C b = resolvent_response(ss, ch, w);
        EXPECT_LT(std::abs(a - b), 1e-8 * std::max(1.0, std::abs(b))) << trial << " w=" << w;
      }
    }
  }
}

TEST(StateSpace, OrderZeroIsPureGain) {
  StateSpaced ss;
  ss.A.resize(0, 0);
  ss.B_u.resize(0);
  ss.B_d.resize(0);
  ss.C.resize(0);
  ss.D_u = 2.5;
  const auto tf = ss_to_tf(ss, Channel::kControl);
  EXPECT_EQ(tf.den().degree(), 0);
  EXPECT_DOUBLE_EQ(tf.dc_gain(), 2.5);
}

TEST(StateSpace, ValidateCatchesShapeMismatch) {
  StateSpaced ss;
  ss.A = Eigen::MatrixXd::Identity(2, 2);
  ss.B_u = Eigen::VectorXd::Zero(3);
  ss.B_d = Eigen::VectorXd::Zero(2);
  ss.C = Eigen::RowVectorXd::Zero(2);
  EXPECT_THROW(ss.validate(), std::invalid_argument);
}
