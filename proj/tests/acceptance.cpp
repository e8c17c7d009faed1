// Acceptance suite: one PASS/FAIL line per criterion, exit 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "qft/io/config.hpp"
#include "qft/lti.hpp"
#include "qft/loop_shaping.hpp"
#include "qft/road_sim.hpp"

using namespace qft;
namespace fs = std::filesystem;
using C = std::complex<double>;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

double rel(double v, double ref) { return std::abs(v - ref) / std::abs(ref); }

// Coefficient of s^(n - k) in a polynomial normalized by its denominator's leading term.
double coeff(const lti::Polynomiald& p, double lead, int n, int k) { return p.coeff(n - k) / lead; }

const io::RunConfig& config() {
  static const auto c = io::load_run_config(fs::path(QFT_DATA_DIR) / "baseline.json");
  return c;
}

const suspension::PlantInstance& nominal() {
  static const auto p = suspension::make_instance(config().plant.nominal, true);
  return p;
}

void ac1(Outcome& o) {
  const auto& p = nominal();
  const double lead = p.Gu.den().leading();
  const double b1 = coeff(p.Gu.den(), lead, 5, 1), b5 = coeff(p.Gu.den(), lead, 5, 5);
  const double a5 = coeff(p.Gd.num(), lead, 5, 5);
  const double c3 = coeff(p.Gu.num(), lead, 5, 3), c5 = coeff(p.Gu.num(), lead, 5, 5);
  // Independent oracles: b1 = tr(-A), b5 = det(-A) = a5 (unit DC gain from road to chassis).
  const Eigen::MatrixXd mA = -p.ss.A;
  o.expect(rel(b5, 6.7587e6) <= 1e-3, "b5");
  o.expect(rel(a5, 6.7587e6) <= 1e-3, "a5");
  o.expect(b1 >= 2414 && b1 <= 2428, "b1 range");
  o.expect(rel(c3, 3.52e5) <= 0.015, "c3");
  o.expect(rel(c5, 3.25e9) <= 0.015, "c5");
  o.expect(rel(b1, mA.trace()) <= 1e-12, "trace oracle");
  o.expect(rel(b5, mA.determinant()) <= 1e-6, "determinant oracle");
  o.detail << " b1=" << b1 << " b5=" << b5 << " a5=" << a5 << " c3=" << c3 << " c5=" << c5;
}

void ac2(Outcome& o) {
  const auto& p = nominal();
  const double lead = p.Gu.den().leading();
  const double gd_max = p.Gd.num().max_abs_coeff() / lead, gu_max = p.Gu.num().max_abs_coeff() / lead;
  double worst = 0;
  for (int k : {1, 2}) {
    worst = std::max(worst, std::abs(coeff(p.Gd.num(), lead, 5, k)) / gd_max);
    worst = std::max(worst, std::abs(coeff(p.Gu.num(), lead, 5, k)) / gu_max);
  }
  o.expect(worst < 1e-6, "noise floor");
  o.detail << " max_relative=" << worst;
}

void ac3(Outcome& o) {
  const auto corners = suspension::sample_plants(config().plant, 2);
  o.expect(corners.size() == 33, "corner count");
  const auto report = suspension::check_published_intervals(corners, suspension::PublishedIntervals::published());
  int intersect = 0, inside = 0;
  for (const auto& c : report.checks) {
    intersect += c.range_intersects;
    inside += c.nominal_ok;
  }
  o.expect(intersect == 15, "range intersection");
  o.expect(inside == 15, "nominal containment");
  o.expect(!report.at("b5").range_within_slack && !report.discrepancies.empty(), "b5 discrepancy flagged");
  o.detail << " ranges_intersect=" << intersect << "/15 nominal_inside=" << inside << "/15 flagged=" << report.discrepancies.size();
}

void ac4(Outcome& o) {
  const auto G = shaping::compose_controller(io::load_controller(*config().controller_file));
  const std::vector<double> num{3673, 7.729e4, 6.233e4}, den{1, 632.9, 2.003e5, 2.662e6, 7.791e6};
  double worst = 0;
  o.expect(G.num().degree() == 2 && G.den().degree() == 4, "degrees");
  if (o.pass) {
    for (int i = 0; i < 3; ++i) worst = std::max(worst, rel(G.num().coeffs()(i), num[i]));
    for (int i = 0; i < 5; ++i) worst = std::max(worst, rel(G.den().coeffs()(i), den[i]));
  }
  o.expect(worst <= 1e-3, "coefficients");
  const auto r = lti::roots(lti::Polynomiald(den));
  double worst_root = 0;
  for (C e : {C(-9.45, 0), C(-4.3, 0), C(-309.6, 309.7), C(-309.6, -309.7)}) {
    double best = 1e300;
    for (const auto& x : r) best = std::min(best, std::abs(x - e) / std::abs(e));
    worst_root = std::max(worst_root, best);
  }
  o.expect(worst_root <= 5e-3, "roots");
  o.detail << " coeff_rel=" << worst << " root_rel=" << worst_root;
}

// Brute-force membership: evaluate the closed-loop magnitude directly.
bool tracking_ok(C p, double W, C g) { return std::abs(g * p / (1.0 + g * p)) <= W; }
bool disturbance_ok(C gd, C gu, double W, C g) { return std::abs(gd / (1.0 + g * gu)) <= W; }

void ac5(Outcome& o) {
  std::mt19937_64 rng(config().seed);
  std::uniform_real_distribution<double> lm(-1.0, 1.0), ang(-M_PI, M_PI), phase(-360.0, 0.0);
  constexpr double step = 1e-3;
  std::size_t bad = 0, points = 0;
  for (int kind = 0; kind < 2; ++kind) {
    for (int n = 0; n < 1000; ++n) {
      const C gu = std::polar(std::pow(10.0, lm(rng)), ang(rng)), gd = std::polar(std::pow(10.0, lm(rng)), ang(rng));
      const double phi = phase(rng);
      const double W = kind == 0 ? 1.2 : 0.4;
      const auto set = kind == 0 ? bounds::tracking_feasible(gu, W, phi) : bounds::disturbance_feasible(gd, gu, W, phi);
      const C dir = std::polar(1.0, phi * M_PI / 180.0);
      for (int k = 0; k <= 20000; ++k) {
        const double g = k * step;
        const bool oracle = kind == 0 ? tracking_ok(gu, W, g * dir) : disturbance_ok(gd, gu, W, g * dir);
        ++points;
        if (oracle != set.contains(g) && set.distance_to_endpoint(g) > step) ++bad;
      }
    }
  }
  o.expect(bad == 0, "oracle agreement");
  const auto t = bounds::tracking_feasible({1.0, 0.0}, 1.2, 180.0);
  const bool hand_t = t.intervals().size() == 2 && std::abs(t.intervals()[0].hi - 6.0 / 11.0) <= 1e-9 &&
                      std::abs(t.intervals()[1].lo - 6.0) <= 1e-9;
  const auto d1 = bounds::disturbance_feasible({1.0, 0.0}, {1.0, 0.0}, 0.4, 180.0);
  const auto d2 = bounds::disturbance_feasible({1.0, 0.0}, {1.0, 0.0}, 0.4, 0.0);
  const bool hand_d = d1.intervals().size() == 1 && std::abs(d1.intervals()[0].lo - 3.5) <= 1e-9 &&
                      d2.intervals().size() == 1 && std::abs(d2.intervals()[0].lo - 1.5) <= 1e-9;
  o.expect(hand_t, "roots 6/11 and 6");
  o.expect(hand_d, "thresholds 1.5 and 3.5");
  o.detail << " cases=2000 grid_points=" << points << " off_endpoint_disagreements=" << bad;
}

void ac6(Outcome& o) {
  const auto& p = nominal();
  const auto G = shaping::compose_controller(io::load_controller(*config().controller_file));
  const double w = 1e-4;
  const C L = lti::freq_eval(G, w) * lti::freq_eval(p.Gu, w);
  const double T = std::abs(L / (1.0 + L));
  const double S = std::abs(lti::freq_eval(p.Gd, w) / (1.0 + L));
  o.expect(std::abs(T - 0.794) <= 0.005 && T <= 1.2, "|T|");
  o.expect(std::abs(S - 0.206) <= 0.005 && S <= 0.4, "|S|");
  const auto plants = suspension::sample_plants(config().plant, 3);
  o.expect(plants.size() == 243, "243 plants");
  std::size_t stable = 0;
  double worst = -1e300;
  for (const auto& q : plants) {
    const auto cp = q.Gu.den() * G.den() + q.Gu.num() * G.num();
    const double a = lti::spectral_abscissa(cp);
    worst = std::max(worst, a);
    stable += a < 0;
  }
  o.expect(stable == plants.size(), "closed-loop stability");
  o.detail << " |T|=" << T << " |S|=" << S << " stable=" << stable << "/" << plants.size() << " worst_real_part=" << worst;
}

void ac7(Outcome& o) {
  const auto& p = nominal();
  const auto design = io::load_controller(*config().controller_file);
  const double dt = 1e-3;
  const auto bumps = road::generate_road(road::TwoBumps{}, dt, 10.0);
  const auto open = road::response_metrics(road::simulate_open_loop(p, bumps, dt, 10.0));
  const auto closed_run = road::simulate_closed_loop(p, design, bumps, dt, 10.0);
  const auto closed = road::response_metrics(closed_run);
  o.expect(closed.peak_disp < open.peak_disp && closed.rms_disp < open.rms_disp, "bump dominance");

  const auto step = road::generate_road(road::Step{0.05, 0.0}, dt, 60.0);
  const double open_ss = road::simulate_open_loop(p, step, dt, 60.0).x_a.tail(1)(0);
  const double closed_ss = road::simulate_closed_loop(p, design, step, dt, 60.0).x_a.tail(1)(0);
  o.expect(std::abs(open_ss - 0.05) <= 5e-4, "open steady state");
  o.expect(std::abs(closed_ss - 0.0103) <= 5e-4, "closed steady state");

  // Halving dt three times on the closed-loop bump response.
  const auto run = [&](double h) {
    return road::simulate_closed_loop(p, design, road::generate_road(road::TwoBumps{}, h, 10.0), h, 10.0).x_a;
  };
  const Eigen::VectorXd y1 = run(1e-3), y2 = run(5e-4), y4 = run(2.5e-4);
  double d12 = 0, d24 = 0;
  for (Eigen::Index k = 0; k < y1.size(); ++k) d12 = std::max(d12, std::abs(y1(k) - y2(2 * k)));
  for (Eigen::Index k = 0; k < y2.size(); ++k) d24 = std::max(d24, std::abs(y2(k) - y4(2 * k)));
  const double order = std::log2(d12 / d24);
  o.expect(order >= 3.8, "observed order");

  const auto scaled = road::simulate_closed_loop(p, design, 2.5 * bumps, dt, 10.0);
  const double lin = (scaled.x_a - 2.5 * closed_run.x_a).cwiseAbs().maxCoeff() / scaled.x_a.cwiseAbs().maxCoeff();
  o.expect(lin <= 1e-9, "linearity");
  o.detail << " peak " << open.peak_disp << "->" << closed.peak_disp << " rms " << open.rms_disp << "->" << closed.rms_disp
           << " steady open=" << open_ss << " closed=" << closed_ss << " order=" << order << " linearity=" << lin;
}

void ac8(Outcome& o) {
  const auto env = specs::synthesize_envelopes(config().tracking);
  // Measure on an independent fine grid with the analytic second-order response as a cross-check.
  const auto up = specs::step_metrics(env.upper, 5e-4, 20.0);
  const auto lo = specs::step_metrics(env.lower, 5e-4, 20.0);
  const double z = env.zeta;
  const double analytic_os = 100.0 * std::exp(-M_PI * z / std::sqrt(1 - z * z));
  o.expect(std::abs(up.overshoot_pct - 5.0) <= 0.5 && std::abs(analytic_os - up.overshoot_pct) < 1e-3, "overshoot");
  o.expect(std::abs(up.settle_2pct_s - 3.0) <= 0.3, "settling");
  o.expect(lo.rise_10_90_s >= 1.7, "lower rise");
  const Eigen::VectorXd yu = specs::step_response(env.upper, 5e-4, 10.0), yl = specs::step_response(env.lower, 5e-4, 10.0);
  const double gap = (yl - yu).maxCoeff();
  o.expect(gap <= 1e-9, "dominance");
  o.detail << " overshoot=" << up.overshoot_pct << "% settle=" << up.settle_2pct_s << "s lower_rise=" << lo.rise_10_90_s
           << "s max(lower-upper)=" << gap;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void ac9(Outcome& o) {
  const auto base = fs::temp_directory_path() / "qft_acceptance_determinism";
  fs::remove_all(base);
  const fs::path cfg = fs::path(QFT_DATA_DIR) / "baseline.json";
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + QFT_CLI_PATH + "\" verify --config \"" + cfg.string() + "\" --out \"" +
                            (base / run).string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    o.expect(rc == 0, std::string("verify run ") + run + " exit " + std::to_string(rc));
  }
  std::size_t files = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(base / "a")) {
    const auto ext = e.path().extension();
    if (ext != ".csv" && ext != ".json") continue;
    ++files;
    const auto other = base / "b" / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differing;
  }
  o.expect(files >= 5, "expected outputs present");
  o.expect(differing == 0, "byte-identical outputs");
  o.detail << " files=" << files << " differing=" << differing;
  fs::remove_all(base);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"AC1 nominal model constants", ac1},
      {"AC2 noise-floor coefficients", ac2},
      {"AC3 interval containment report", ac3},
      {"AC4 controller reconstruction", ac4},
      {"AC5 bound solver vs oracle", ac5},
      {"AC6 design verification at DC", ac6},
      {"AC7 simulation properties", ac7},
      {"AC8 envelope specs", ac8},
      {"AC9 determinism", ac9},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.2fs)%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
