#include "suites.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "krein/testbed.hpp"

namespace krein::cli {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

class Recorder {
 public:
  explicit Recorder(const SuiteOptions& o) : o_(o) {}

  template <class F>
  void run(const std::string& name, F&& f) {
    Check c;
    c.name = name;
    c.tolerance = tolerance(name);
    try {
      c.residual = f(c.note);
    } catch (const std::exception& e) {
      c.residual = inf;
      c.note = e.what();
    }
    out_.push_back(std::move(c));
  }

  std::vector<Check> take() { return std::move(out_); }

 private:
  double tolerance(const std::string& name) const {
    if (auto it = o_.overrides.find(name); it != o_.overrides.end()) return it->second;
    return default_tolerances().at(name);
  }

  const SuiteOptions& o_;
  std::vector<Check> out_;
};

double max_over(std::initializer_list<double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

// root of s - 1 - exp(-s) by bisection
double two_center_root() {
  auto f = [](double s) { return s - 1.0 - std::exp(-s); };
  const auto r = boost::math::tools::bisect(f, 1.0, 2.0, boost::math::tools::eps_tolerance<double>(53));
  const double s = 0.5 * (r.first + r.second);
  return s * s;
}

double single_root_error(const points::BoundStateSearch& bs, double exact, std::string& note) {
  if (bs.states.size() != 1) {
    note = "found " + std::to_string(bs.states.size()) + " bound states, expected 1";
    return inf;
  }
  return std::abs(bs.states[0].z_star - exact);
}

}  // namespace

const Tolerances& default_tolerances() {
  static const Tolerances t = {
      {"testbed.gbreve_difference", 1e-12},
      {"testbed.g_difference", 1e-12},
      {"testbed.gamma_difference", 1e-12},
      {"testbed.gamma_hermiticity", 1e-12},
      {"testbed.gamma_hat_zero", 1e-12},
      {"testbed.pseudo_resolvent", 1e-12},
      {"testbed.adjoint", 1e-12},
      {"points.gamma_difference", 1e-8},
      {"points.gamma_difference_conjugate", 1e-8},
      {"points.gamma_hermiticity", 1e-12},
      {"points.gbreve_difference", 1e-6},
      {"points.g_difference", 1e-6},
      {"points.pseudo_resolvent", 1e-6},
      {"points.adjoint", 1e-6},
      {"points.gamma_derivative", 1e-7},
      {"points.single_center_root", 1e-10},
      {"points.single_center_repulsive_roots", 0.5},
      {"points.two_center_root", 1e-8},
      {"points.two_center_symmetry", 1e-8},
      {"points.two_center_antisymmetric_roots", 0.5},
      {"points.scaling_law", 1e-8},
      {"points.fd_eigenfunction_single", 1e-3},
      {"points.fd_eigenfunction_pair", 1e-3},
      {"curve.epsilon_independence", 1e-6},
      {"curve.hermiticity_real", 1e-10},
      {"curve.gamma_conjugation", 1e-10},
      {"curve.gamma_difference", 1e-5},
      {"curve.gamma_difference_refinement", 1.0},
      {"curve.gamma_derivative", 1e-5},
      {"curve.root_refinement", 1e-3},
      {"curve.root_fourier_deficit", 1e-3},
      {"dalembert.symbol_identity", 1e-8},
      {"dalembert.symbol_conjugation", 1e-15},
      {"dalembert.symbol_derivative", 1e-5},
      {"dalembert.hermitian_pairing", 1e-6},
      {"dalembert.theta_slope", 0.05},
      {"dalembert.invertibility_bound", 1.0},
      {"dalembert.boost_rest", 1e-10},
      {"dalembert.boost_translation", 1e-10},
      {"dalembert.boost_moving", 1e-4},
      {"dalembert.adjoint", 1e-5},
      {"dalembert.pseudo_resolvent", 1e-4},
  };
  return t;
}

TestbedShape testbed_shape(std::uint64_t seed) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return {static_cast<int>(8 + x % 43), static_cast<int>(1 + (x >> 32) % 5)};
}

points::PointConfig two_center_config(double separation) {
  return points::PointConfig({{0.0, 0.0, 0.0}, {separation, 0.0, 0.0}}, ThetaMatrix::scalar(2, -1.0 / four_pi));
}

dalembert::Separable default_line_data() { return {{0.0, 1.0}, {{0.5, 0.2, -0.3}, 1.0}}; }

std::vector<Check> testbed_suite(const SuiteOptions& o) {
  Recorder r(o);
  const Complex z(0.3, 1.0), w(-0.7, -0.5);
  std::vector<FiniteTestbed> beds;
  std::vector<ThetaMatrix> thetas;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const TestbedShape s = testbed_shape(o.seed + k);
    beds.push_back(make_testbed(s.m, s.n, o.seed + k));
    std::vector<double> d(s.n);
    for (int i = 0; i < s.n; ++i) d[i] = std::vector<double>{1.0, -1.0, 0.0, 0.5, 2.0}[i];
    thetas.push_back(ThetaMatrix::diagonal(d));
  }
  auto over_beds = [&](auto&& f) {
    return [&, f](std::string&) {
      double m = 0.0;
      for (std::size_t k = 0; k < beds.size(); ++k) m = std::max(m, f(beds[k], thetas[k]));
      return m;
    };
  };
  r.run("testbed.gbreve_difference",
        over_beds([&](const FiniteTestbed& b, const ThetaMatrix&) { return verify_gbreve_difference(b, z, w); }));
  r.run("testbed.g_difference",
        over_beds([&](const FiniteTestbed& b, const ThetaMatrix&) { return verify_g_difference(b, z, w); }));
  r.run("testbed.gamma_difference", over_beds([&](const FiniteTestbed& b, const ThetaMatrix&) {
          return std::max(verify_gamma_difference(b, z, w), verify_gamma_difference(b, z, std::conj(z)));
        }));
  r.run("testbed.gamma_hermiticity",
        over_beds([&](const FiniteTestbed& b, const ThetaMatrix&) { return verify_gamma_hermiticity(b, z); }));
  r.run("testbed.gamma_hat_zero", over_beds([&](const FiniteTestbed& b, const ThetaMatrix&) {
          return max_abs(b.gamma(Complex(b.z0())));
        }));
  r.run("testbed.pseudo_resolvent", over_beds([&](const FiniteTestbed& b, const ThetaMatrix& t) {
          return verify_pseudo_resolvent(b, t, z, w);
        }));
  r.run("testbed.adjoint",
        over_beds([&](const FiniteTestbed& b, const ThetaMatrix& t) { return verify_adjoint(b, t, z); }));
  return r.take();
}

std::vector<Check> points_suite(const SuiteOptions& o) {
  Recorder r(o);
  const points::PointConfig model = o.points ? o.points->config : two_center_config();
  const points::PointSystem sys(model.centers());
  const Complex z(1.0, 1.0), w(3.0, -2.0);
  r.run("points.gamma_difference", [&](std::string&) { return verify_gamma_difference(sys, z, w); });
  r.run("points.gamma_difference_conjugate",
        [&](std::string&) { return verify_gamma_difference(sys, z, std::conj(z)); });
  r.run("points.gamma_hermiticity", [&](std::string&) { return verify_gamma_hermiticity(sys, z); });
  r.run("points.gbreve_difference", [&](std::string&) { return verify_gbreve_difference(sys, z, w); });
  r.run("points.g_difference", [&](std::string&) { return verify_g_difference(sys, z, w); });
  r.run("points.pseudo_resolvent", [&](std::string&) { return verify_pseudo_resolvent(sys, model.theta(), z, w); });
  r.run("points.adjoint", [&](std::string&) { return verify_adjoint(sys, model.theta(), z); });
  r.run("points.gamma_derivative",
        [&](std::string&) { return points::gamma_derivative_check(Complex(2.0, 1.0), model); });

  const points::PointConfig single({{0.0, 0.0, 0.0}}, ThetaMatrix::scalar(1, -1.0 / four_pi));
  const points::PointConfig repulsive({{0.0, 0.0, 0.0}}, ThetaMatrix::scalar(1, 0.1));
  const points::PointConfig pair = two_center_config();
  const points::BoundStateSearch bs1 = points::bound_states(single, 0.01, 100.0, 64);
  const points::BoundStateSearch bs2 = points::bound_states(pair, 0.01, 100.0, 64);
  r.run("points.single_center_root", [&](std::string& note) { return single_root_error(bs1, 1.0, note); });
  r.run("points.single_center_repulsive_roots", [&](std::string&) {
    return static_cast<double>(points::bound_states(repulsive, 0.01, 100.0, 64).states.size());
  });
  const double exact = two_center_root();
  r.run("points.two_center_root", [&](std::string& note) { return single_root_error(bs2, exact, note); });
  r.run("points.two_center_symmetry", [&](std::string& note) {
    if (bs2.states.empty()) {
      note = "no bound state";
      return inf;
    }
    const VectorXc& c = bs2.states[0].coefficients;
    return std::abs(c(0) - c(1));
  });
  r.run("points.two_center_antisymmetric_roots", [&](std::string&) {
    // sign changes of the antisymmetric Rayleigh quotient along the search grid
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
    return static_cast<double>(changes);
  });
  r.run("points.scaling_law", [&](std::string& note) {
    if (bs2.states.size() != 1) {
      note = "reference configuration has no single bound state";
      return inf;
    }
    const double z0 = bs2.states[0].z_star;
    double worst = 0.0;
    for (double s : {0.5, 2.0}) {
      const auto bs = points::bound_states(pair.scaled(s), 0.01 / (s * s), 100.0 / (s * s), 64);
      if (bs.states.size() != 1) {
        note = "scaled configuration has " + std::to_string(bs.states.size()) + " bound states";
        return inf;
      }
      worst = std::max(worst, std::abs(bs.states[0].z_star * s * s - z0) / z0);
    }
    return worst;
  });
  r.run("points.fd_eigenfunction_single", [&](std::string& note) {
    if (bs1.states.empty()) {
      note = "no bound state";
      return inf;
    }
    return points::eigenfunction_fd_residual(bs1.states[0], single).relative;
  });
  r.run("points.fd_eigenfunction_pair", [&](std::string& note) {
    if (bs2.states.empty()) {
      note = "no bound state";
      return inf;
    }
    return points::eigenfunction_fd_residual(bs2.states[0], pair).relative;
  });
  return r.take();
}

std::vector<Check> curve_suite(const SuiteOptions& o) {
  Recorder r(o);
  const CurveInput in = o.curve ? *o.curve : CurveInput(curve::CurveModel::circle(1.0, 64));
  const curve::CurveModel& c = in.curve;
  const curve::CurveModel fine = in.with_size(2 * c.size());
  const double L = c.length();
  const double eps = in.epsilon > 0.0 ? in.epsilon : L / 20.0;
  const Complex z(1.0, 1.0);

  r.run("curve.epsilon_independence", [&](std::string&) {
    const MatrixXc m1 = curve::build_gamma_tilde(1.0, c, L / 40.0).matrix;
    const MatrixXc m2 = curve::build_gamma_tilde(1.0, c, L / 20.0).matrix;
    const MatrixXc m3 = curve::build_gamma_tilde(1.0, c, L / 8.0).matrix;
    return max_over({max_abs(m1 - m2), max_abs(m1 - m3), max_abs(m2 - m3)});
  });
  r.run("curve.hermiticity_real",
        [&](std::string&) { return curve::build_gamma_tilde(1.0, c, eps).hermitian_residual(); });
  r.run("curve.gamma_conjugation", [&](std::string&) {
    return max_abs(curve::build_gamma_tilde(z, c, eps).matrix.adjoint() -
                   curve::build_gamma_tilde(std::conj(z), c, eps).matrix);
  });
  const double coarse_diff = [&] {
    try {
      return curve::gamma_difference_residual(z, 2.0, c);
    } catch (const KreinError&) {
      return inf;
    }
  }();
  r.run("curve.gamma_difference", [&](std::string&) { return curve::gamma_difference_residual(z, 2.0, c); });
  r.run("curve.gamma_difference_refinement", [&](std::string& note) {
    const double f = curve::gamma_difference_residual(z, 2.0, fine);
    note = "residual at N=" + std::to_string(fine.size()) + " over residual at N=" + std::to_string(c.size());
    return f / coarse_diff;
  });
  r.run("curve.gamma_derivative", [&](std::string&) { return curve::gamma_derivative_residual(z, c); });

  const curve::CurveBoundStates coarse = curve::curve_bound_states(c, in.beta, in.a, in.b, in.resolution, in.epsilon);
  r.run("curve.root_refinement", [&](std::string& note) {
    const auto refined = curve::curve_bound_states(fine, in.beta, in.a, in.b, in.resolution, in.epsilon);
    if (coarse.roots.empty() || refined.roots.empty()) {
      note = "no root on the search interval";
      return inf;
    }
    const double a = coarse.roots[0].lambda, b = refined.roots[0].lambda;
    return std::abs(a - b) / std::abs(b);
  });
  if (c.closed()) {
    r.run("curve.root_fourier_deficit", [&](std::string& note) {
      if (coarse.roots.empty()) {
        note = "no root on the search interval";
        return inf;
      }
      return 1.0 - curve::fourier_mode_overlap(coarse.roots[0].eigenvector);
    });
  }
  return r.take();
}

std::vector<Check> dalembert_suite(const SuiteOptions& o) {
  using namespace dalembert;
  Recorder r(o);
  const bool custom = o.dalembert.has_value();
  const Separable data = custom ? o.dalembert->data : default_line_data();
  const MultiplierGrid grid = custom ? o.dalembert->resolved_grid() : MultiplierGrid::for_width(1.0, 0.0);
  const double theta = custom ? o.dalembert->line.theta : 0.5;
  const Vec4 y = custom ? o.dalembert->line.y : Vec4{0.3, 0.2, -0.1, 0.4};
  Vec3 v = custom ? o.dalembert->line.v : Vec3{0.5, 0.0, 0.0};
  if (v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0) v = {0.5, 0.0, 0.0};
  const Complex zb = custom ? o.dalembert->z : Complex(1.0, 2.0);

  const Complex zs[5] = {{1.0, 1.0}, {-2.0, 3.0}, {0.5, -2.0}, {0.0, 4.0}, {-3.0, -1.0}};
  const Complex ws[5] = {{2.0, -1.0}, {-1.0, 0.5}, {3.0, 2.0}, {-4.0, -3.0}, {0.2, 1.0}};
  const double hs[3] = {0.0, 1.5, 4.0};
  r.run("dalembert.symbol_identity", [&](std::string&) {
    double m = 0.0;
    for (const Complex& z : zs)
      for (const Complex& w : ws)
        for (double h : hs) m = std::max(m, symbol_difference_check(h, z, w));
    return m;
  });
  r.run("dalembert.symbol_conjugation", [&](std::string&) {
    double m = 0.0;
    for (const Complex& z : zs)
      for (double h : hs) m = std::max(m, std::abs(gamma_symbol(h, std::conj(z)) - std::conj(gamma_symbol(h, z))));
    return m;
  });
  r.run("dalembert.symbol_derivative", [&](std::string&) {
    const Complex z(1.0, 1.0);
    const double h = 0.5, d = 1e-6;
    const Complex q = symbol_difference_quadrature(h, z + d, z) / d;
    return std::abs(q - 1.0 / (8.0 * pi * sqrt_principal(z - h * h)));
  });
  r.run("dalembert.hermitian_pairing", [&](std::string&) {
    std::vector<Complex> xi(grid.size());
    const double c = grid.center(), w = data.phi.width;
    for (int j = 0; j < grid.size(); ++j) {
      const double t = (grid.time(j) - c) / w;
      xi[j] = std::exp(-0.5 * (t - 0.5) * (t - 0.5) / 1.44) * Complex(1.0, 0.3 * t);
    }
    return hermitian_pairing_residual(Complex(2.0, 1.0), data, xi, grid);
  });
  r.run("dalembert.theta_slope", [&](std::string&) {
    return std::abs(dominant_theta_slope(Complex(1.0, 1.0), data, grid, {1e2, 1e4, 1e6}) + 1.0);
  });
  r.run("dalembert.invertibility_bound", [&](std::string&) {
    const InvertibilityBound b = invertibility_bound(theta, zb, grid);
    return b.lower_bound / b.min_modulus;
  });
  r.run("dalembert.boost_rest",
        [&](std::string&) { return boost_covariance_check(LineConfig({}, {}, theta), zb, data).residual; });
  r.run("dalembert.boost_translation",
        [&](std::string&) { return boost_covariance_check(LineConfig(y, {}, theta), zb, data).residual; });
  r.run("dalembert.boost_moving",
        [&](std::string&) { return boost_covariance_check(LineConfig(y, v, theta), zb, data, 16).residual; });
  const LineSystem sys(grid);
  const ThetaMatrix t = ThetaMatrix::scalar(grid.size(), theta);
  r.run("dalembert.adjoint", [&](std::string&) { return verify_adjoint(sys, t, Complex(1.0, 1.0)); });
  r.run("dalembert.pseudo_resolvent",
        [&](std::string&) { return verify_pseudo_resolvent(sys, t, Complex(0.0, 2.0), Complex(1.0, 1.0)); });
  return r.take();
}

}  // namespace krein::cli
