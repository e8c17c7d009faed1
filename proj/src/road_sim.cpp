#include "qft/road_sim.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "qft/lti.hpp"

namespace qft::road {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void fill_pulse(Eigen::VectorXd& v, double height, double start, double width, double dt) {
  const auto first = static_cast<Eigen::Index>(std::llround(start / dt));
  const auto last = static_cast<Eigen::Index>(std::llround((start + width) / dt));
  for (Eigen::Index k = std::max<Eigen::Index>(first, 0); k < std::min(last, v.size()); ++k) v(k) = height;
}

}  // namespace

std::string profile_name(const RoadProfile& p) {
  return std::visit(overloaded{
                        [](const TwoBumps&) { return std::string("two_bumps"); },
                        [](const Impulse&) { return std::string("impulse"); },
                        [](const WhiteNoise&) { return std::string("white_noise"); },
                        [](const Step&) { return std::string("step"); },
                        [](const Custom&) { return std::string("custom"); },
                    },
                    p);
}

Eigen::VectorXd generate_road(const RoadProfile& p, double dt, double T) {
  const auto n = lti::step_count(dt, T) + 1;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  std::visit(overloaded{
                 [&](const TwoBumps& b) {
                   if (!(b.width_s > 0)) throw std::invalid_argument("TwoBumps: width must be positive");
                   if (!(b.t2_s > b.t1_s + b.width_s)) throw std::invalid_argument("TwoBumps: bumps overlap");
                   if (b.t2_s + b.width_s > T) throw std::invalid_argument("TwoBumps: horizon does not cover the second bump");
                   fill_pulse(v, b.height_m, b.t1_s, b.width_s, dt);
                   fill_pulse(v, b.height_m, b.t2_s, b.width_s, dt);
                 },
                 [&](const Impulse& i) {
                   if (!(i.width_s > 0)) throw std::invalid_argument("Impulse: width must be positive");
                   if (i.start_s + i.width_s > T) throw std::invalid_argument("Impulse: horizon does not cover the pulse");
                   fill_pulse(v, i.height_m, i.start_s, i.width_s, dt);
                 },
                 [&](const WhiteNoise& w) {
                   if (!(w.std_m >= 0)) throw std::invalid_argument("WhiteNoise: std must be non-negative");
                   if (!(w.hold_dt_s > 0)) throw std::invalid_argument("WhiteNoise: hold interval must be positive");
                   if (w.std_m == 0.0) return;
                   std::mt19937_64 rng(w.seed);
                   std::normal_distribution<double> dist(0.0, w.std_m);
                   const auto hold = std::max<long long>(1, std::llround(w.hold_dt_s / dt));
                   double value = 0.0;
                   for (Eigen::Index k = 0; k < n; ++k) {
                     if (k % hold == 0) value = dist(rng);
                     v(k) = value;
                   }
                 },
                 [&](const Step& s) { fill_pulse(v, s.height_m, s.start_s, T - s.start_s + dt, dt); },
                 [&](const Custom& c) {
                   if (static_cast<Eigen::Index>(c.samples.size()) != n) {
                     throw std::invalid_argument("Custom road: expected " + std::to_string(n) + " samples, got " +
                                                 std::to_string(c.samples.size()));
                   }
                   v = Eigen::Map<const Eigen::VectorXd>(c.samples.data(), n);
                 },
             },
             p);
  return v;
}

namespace {

Eigen::VectorXd time_base(Eigen::Index n, double dt) {
  Eigen::VectorXd t(n);
  for (Eigen::Index k = 0; k < n; ++k) t(k) = static_cast<double>(k) * dt;
  return t;
}

// x_a'' from the chassis row of the plant state equation.
Eigen::VectorXd chassis_acceleration(const lti::StateSpaced& plant, const Eigen::MatrixXd& xp, const Eigen::VectorXd& du,
                                     const Eigen::VectorXd& road) {
  Eigen::VectorXd acc = (plant.A.row(1) * xp).transpose();
  acc += plant.B_u(1) * du + plant.B_d(1) * road;
  return acc;
}

}  // namespace

SimResult simulate_open_loop(const suspension::PlantInstance& plant, const Eigen::VectorXd& road, double dt, double T) {
  const auto n = lti::step_count(dt, T) + 1;
  if (road.size() != n) throw std::invalid_argument("simulate_open_loop: road length does not match the time grid");
  SimResult r;
  r.mode = LoopMode::kOpen;
  r.plant_stable = lti::is_hurwitz(plant.Gu.den());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd x = lti::simulate_rk4<double>(plant.ss, {zero.data(), static_cast<std::size_t>(n)},
                                                      {road.data(), static_cast<std::size_t>(n)}, dt, T);
  r.t = time_base(n, dt);
  r.x_a = x.row(0).transpose();
  r.x_t = x.row(2).transpose();
  r.delta_a = zero;
  r.x_a_ddot = chassis_acceleration(plant.ss, x, r.delta_a, road);
  return r;
}

UnstableLoopError::UnstableLoopError(std::complex<double> pole)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "controller does not stabilize the plant: closed-loop pole at " << pole.real()
            << (pole.imag() < 0 ? " - " : " + ") << std::abs(pole.imag()) << "j";
        return msg.str();
      }()),
      pole_(pole) {}

lti::StateSpaced closed_loop_model(const suspension::PlantInstance& plant, const lti::TransferFunctiond& controller) {
  const auto c = lti::tf_to_ss(controller);
  const auto& p = plant.ss;
  const Eigen::Index np = p.order();
  const Eigen::Index nc = c.order();
  lti::StateSpaced cl;
  cl.A.setZero(np + nc, np + nc);
  cl.A.topLeftCorner(np, np) = p.A - c.D_u * p.B_u * p.C;
  cl.A.topRightCorner(np, nc) = p.B_u * c.C;
  cl.A.bottomLeftCorner(nc, np) = -c.B_u * p.C;
  cl.A.bottomRightCorner(nc, nc) = c.A;
  // Control channel carries the reference, disturbance channel the road.
  cl.B_u.setZero(np + nc);
  cl.B_u.head(np) = c.D_u * p.B_u;
  cl.B_u.tail(nc) = c.B_u;
  cl.B_d.setZero(np + nc);
  cl.B_d.head(np) = p.B_d;
  cl.C.setZero(np + nc);
  cl.C.head(np) = p.C;
  cl.D_u = 0.0;
  cl.D_d = 0.0;
  return cl;
}

SimResult simulate_closed_loop(const suspension::PlantInstance& plant, const shaping::ControllerDesign& design,
                               const Eigen::VectorXd& road, double dt, double T, double reference) {
  const auto n = lti::step_count(dt, T) + 1;
  if (road.size() != n) throw std::invalid_argument("simulate_closed_loop: road length does not match the time grid");
  const auto G = shaping::compose_controller(design);
  if (!G.is_proper()) throw shaping::ImproperControllerError(G.relative_degree());

  const auto cp = shaping::characteristic_polynomial(plant, G);
  const auto poles = lti::roots(cp);  // sorted by descending real part
  if (!(poles.front().real() < -lti::kHurwitzMargin)) throw UnstableLoopError(poles.front());

  const auto cl = closed_loop_model(plant, G);
  const auto c = lti::tf_to_ss(G);
  const Eigen::VectorXd ref = Eigen::VectorXd::Constant(n, reference);
  const Eigen::MatrixXd x = lti::simulate_rk4<double>(cl, {ref.data(), static_cast<std::size_t>(n)},
                                                      {road.data(), static_cast<std::size_t>(n)}, dt, T);
  const Eigen::Index np = plant.ss.order();
  const Eigen::MatrixXd xp = x.topRows(np);

  SimResult r;
  r.mode = LoopMode::kClosed;
  r.plant_stable = lti::is_hurwitz(plant.Gu.den());
  r.t = time_base(n, dt);
  r.x_a = xp.row(0).transpose();
  r.x_t = xp.row(2).transpose();
  const Eigen::VectorXd error = ref - r.x_a;
  r.delta_a = c.D_u * error;
  if (c.order() > 0) r.delta_a += (c.C * x.bottomRows(c.order())).transpose();
  r.x_a_ddot = chassis_acceleration(plant.ss, xp, r.delta_a, road);
  return r;
}

double peak_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double rms(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

ResponseMetrics response_metrics(const SimResult& r) {
  if (r.x_a.size() == 0) throw std::invalid_argument("response_metrics: empty result");
  return {peak_abs(r.x_a), rms(r.x_a), peak_abs(r.x_a_ddot), rms(r.x_a_ddot)};
}

}  // namespace qft::road
