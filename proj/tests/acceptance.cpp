// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <boost/math/tools/roots.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "krein/curve.hpp"
#include "krein/dalembert.hpp"
#include "krein/linalg.hpp"
#include "krein/points.hpp"
#include "suites.hpp"

using namespace krein;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_residual(const std::vector<cli::Check>& cs) {
  double m = 0.0;
  for (const auto& c : cs) m = std::max(m, c.residual);
  return m;
}

const double alpha_crit = -1.0 / four_pi;

points::PointConfig single(double alpha) { return points::PointConfig({{0.0, 0.0, 0.0}}, ThetaMatrix::scalar(1, alpha)); }

// s = 1 + exp(-s) by plain bisection, squared
double pair_root_oracle() {
  auto f = [](double s) { return s - 1.0 - std::exp(-s); };
  const auto r = boost::math::tools::bisect(f, 1.0, 2.0, [](double a, double b) { return std::abs(b - a) < 1e-15; });
  const double s = 0.5 * (r.first + r.second);
  return s * s;
}

Outcome testbed_algebra() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = cli::testbed_suite({});
  const double secs = elapsed(t0);
  bool shapes = true;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto s = cli::testbed_shape(k);
    shapes = shapes && s.m <= 50 && s.n <= 5;
  }
  const double m = max_residual(checks);
  return {checks.size() == 7 && shapes && m < 1e-12 && secs < 10.0,
          "20 testbeds, 7 identities, max residual " + fmt("%.2e", m) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome single_center() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto bs = points::bound_states(single(alpha_crit), 0.01, 100.0, 64);
  const auto none = points::bound_states(single(0.1), 0.01, 100.0, 64);
  const double secs = elapsed(t0);
  if (bs.states.size() != 1) return {false, std::to_string(bs.states.size()) + " bound states for the attractive center"};
  const double err = std::abs(bs.states[0].z_star - 1.0);
  const double energy = bs.states[0].energy();
  return {err < 1e-10 && std::abs(energy + 1.0) < 1e-10 && none.states.empty() && secs < 1.0,
          "|z* - 1| = " + fmt("%.1e", err) + ", repulsive roots " + std::to_string(none.states.size()) + ", " +
              fmt("%.3f", secs) + " s"};
}

Outcome two_centers() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pair = cli::two_center_config();
  const auto bs = points::bound_states(pair, 0.01, 100.0, 64);
  // the antisymmetric Rayleigh quotient must not change sign on the search grid
  VectorXc v(2);
  v << 1.0, -1.0;
  v /= v.norm();
  int changes = 0;
  double prev = 0.0;
  for (double lam : log_grid(0.01, 100.0, 256)) {
    const double q = (v.adjoint() * points::gamma_matrix(lam, pair) * v)(0).real();
    if (prev != 0.0 && (q > 0.0) != (prev > 0.0)) ++changes;
    prev = q;
  }
  const double secs = elapsed(t0);
  if (bs.states.size() != 1) return {false, std::to_string(bs.states.size()) + " bound states"};
  const double exact = pair_root_oracle();
  const double err = std::abs(bs.states[0].z_star - exact);
  const VectorXc& c = bs.states[0].coefficients;
  const double asym = std::abs(c(0) - c(1)) / c.norm();
  return {err < 1e-8 && asym < 1e-8 && changes == 0 && secs < 1.0,
          "z* = " + fmt("%.10f", bs.states[0].z_star) + ", |error| " + fmt("%.1e", err) + ", asymmetry " +
              fmt("%.1e", asym) + ", antisymmetric sign changes " + std::to_string(changes) + ", " +
              fmt("%.3f", secs) + " s"};
}

Outcome scaling_law() {
  const auto pair = cli::two_center_config();
  const auto bs = points::bound_states(pair, 0.01, 100.0, 64);
  if (bs.states.size() != 1) return {false, "reference has " + std::to_string(bs.states.size()) + " states"};
  const double z0 = bs.states[0].z_star;
  double worst = 0.0;
  for (double s : {0.5, 2.0}) {
    const auto b = points::bound_states(pair.scaled(s), 0.01 / (s * s), 100.0 / (s * s), 64);
    if (b.states.size() != 1) return {false, "scaled model has " + std::to_string(b.states.size()) + " states"};
    worst = std::max(worst, std::abs(b.states[0].z_star * s * s - z0) / z0);
  }
  return {worst < 1e-8, "max relative deviation " + fmt("%.1e", worst)};
}

Outcome quadrature_consistency() {
  const points::PointSystem sys(cli::two_center_config().centers());
  const Complex z(1.0, 1.0), w(3.0, -2.0);
  const double p = std::max(verify_gamma_difference(sys, z, w), verify_gamma_difference(sys, z, std::conj(z)));
  const double c64 = curve::gamma_difference_residual(z, 2.0, curve::CurveModel::circle(1.0, 64));
  const double c128 = curve::gamma_difference_residual(z, 2.0, curve::CurveModel::circle(1.0, 128));
  return {p < 1e-8 && c64 < 1e-5 && c128 < c64,
          "points " + fmt("%.1e", p) + ", curve N=64 " + fmt("%.2e", c64) + ", N=128 " + fmt("%.2e", c128)};
}

Outcome epsilon_independence() {
  const auto c = curve::CurveModel::circle(1.0, 64);
  const double L = c.length();
  const MatrixXc m1 = curve::build_gamma_tilde(1.0, c, L / 40.0).matrix;
  const MatrixXc m2 = curve::build_gamma_tilde(1.0, c, L / 20.0).matrix;
  const MatrixXc m3 = curve::build_gamma_tilde(1.0, c, L / 8.0).matrix;
  const double spread = std::max({max_abs(m1 - m2), max_abs(m1 - m3), max_abs(m2 - m3)});
  return {spread < 1e-6, "max entrywise spread " + fmt("%.2e", spread)};
}

Outcome eigenfunction_residual() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto one = single(alpha_crit);
  const auto pair = cli::two_center_config();
  const auto b1 = points::bound_states(one, 0.01, 100.0, 64);
  const auto b2 = points::bound_states(pair, 0.01, 100.0, 64);
  if (b1.states.empty() || b2.states.empty()) return {false, "missing bound state"};
  const auto r1 = points::eigenfunction_fd_residual(b1.states[0], one);
  const auto r2 = points::eigenfunction_fd_residual(b2.states[0], pair);
  const double secs = elapsed(t0);
  const bool setup = r1.spacing == 0.01 && r2.spacing == 0.01 && r1.exclusion == 0.1 && r2.exclusion == 0.1;
  return {setup && r1.relative < 1e-3 && r2.relative < 1e-3 && secs < 60.0,
          "single " + fmt("%.2e", r1.relative) + ", pair " + fmt("%.2e", r2.relative) + ", " + fmt("%.1f", secs) +
              " s"};
}

Outcome symbol_identity() {
  using namespace dalembert;
  const Complex zs[5] = {{1.0, 1.0}, {-2.0, 3.0}, {0.5, -2.0}, {0.0, 4.0}, {-3.0, -1.0}};
  const Complex ws[5] = {{2.0, -1.0}, {-1.0, 0.5}, {3.0, 2.0}, {-4.0, -3.0}, {0.2, 1.0}};
  double diff = 0.0, conj = 0.0;
  for (const auto& z : zs)
    for (double h : {0.0, 1.5, 4.0}) {
      conj = std::max(conj, std::abs(gamma_symbol(h, std::conj(z)) - std::conj(gamma_symbol(h, z))));
      for (const auto& w : ws) diff = std::max(diff, symbol_difference_check(h, z, w));
    }
  const double slope = dominant_theta_slope(Complex(1.0, 1.0), cli::default_line_data(),
                                            MultiplierGrid::for_width(1.0, 0.0), {1e2, 1e4, 1e6});
  return {diff < 1e-8 && conj <= 1e-15 && std::abs(slope + 1.0) < 0.05,
          "difference " + fmt("%.1e", diff) + ", conjugation " + fmt("%.1e", conj) + ", slope " + fmt("%.4f", slope)};
}

Outcome boost_covariance() {
  using namespace dalembert;
  const Separable d = cli::default_line_data();
  const Complex z(1.0, 2.0);
  const double rest = boost_covariance_check(LineConfig({}, {}, 0.5), z, d).residual;
  const double shift = boost_covariance_check(LineConfig({0.3, 0.2, -0.1, 0.4}, {}, 0.5), z, d).residual;
  const BoostCheck moving = boost_covariance_check(LineConfig({0.3, 0.2, -0.1, 0.4}, {0.5, 0.0, 0.0}, 0.5), z, d, 16);
  return {rest < 1e-10 && shift < 1e-10 && moving.residual < 1e-4 && moving.points.size() == 16,
          "rest " + fmt("%.1e", rest) + ", translation " + fmt("%.1e", shift) + ", v=0.5 " +
              fmt("%.1e", moving.residual)};
}

Outcome verify_all() {
  const fs::path out = fs::temp_directory_path() / ("krein-acceptance-" + std::to_string(::getpid()));
  std::error_code ec;
  fs::remove_all(out, ec);
  const std::string cmd = std::string(KREIN_CLI_PATH) + " verify all --out " + out.string() + " > " +
                          (out.string() + ".log") + " 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  const double secs = elapsed(t0);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  Outcome o;
  std::size_t listed = 0, total = 0;
  bool passed = false;
  try {
    std::ifstream f(out / "report.json");
    const auto rep = nlohmann::json::parse(f);
    passed = rep.at("passed").get<bool>();
    for (const auto& c : rep.at("checks")) {
      ++total;
      if (c.contains("residual") && c.contains("tolerance") && c.contains("name")) ++listed;
    }
  } catch (const std::exception& e) {
    o.detail = std::string("report unreadable: ") + e.what() + "; ";
  }
  o.pass = code == 0 && passed && total > 0 && listed == total && secs < 300.0;
  o.detail += "exit " + std::to_string(code) + ", " + std::to_string(listed) + "/" + std::to_string(total) +
              " checks listed with residual and tolerance, " + fmt("%.1f", secs) + " s";
  fs::remove_all(out, ec);
  fs::remove(out.string() + ".log", ec);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"testbed algebra", testbed_algebra},
      {"single point interaction", single_center},
      {"two centers", two_centers},
      {"scaling law", scaling_law},
      {"gamma difference quadrature consistency", quadrature_consistency},
      {"epsilon independence on the circle", epsilon_independence},
      {"eigenfunction finite-difference residual", eigenfunction_residual},
      {"d'Alembert symbol identity", symbol_identity},
      {"boost covariance", boost_covariance},
      {"end-to-end verify all", verify_all},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu: %s (%s) [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), elapsed(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
