#include "krein/dalembert.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "krein/linalg.hpp"
#include "krein/parallel.hpp"
#include "krein/quadrature.hpp"

namespace krein::dalembert {

namespace {

constexpr double mode_cutoff = 1e-18;  // relative size below which a Fourier mode is dropped

std::mutex fftw_mutex;

// in place, FFTW sign convention: -1 forward, +1 backward, unnormalized
void fft(std::vector<Complex>& a, int sign) {
  std::lock_guard<std::mutex> lock(fftw_mutex);
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(a.size()), p, p, sign, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

std::vector<char> active_modes(const std::vector<Complex>& c) {
  double big = 0.0;
  for (const auto& x : c) big = std::max(big, std::abs(x));
  std::vector<char> on(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) on[k] = std::abs(c[k]) > mode_cutoff * big;
  return on;
}

Vec3 spatial(const Vec4& q) { return {q[1], q[2], q[3]}; }

Separable translated(const Separable& d, const Vec4& y) {
  Separable out = d;
  out.phi.center -= y[0];
  for (int a = 0; a < 3; ++a) out.varphi.center[a] -= y[a + 1];
  return out;
}

// (theta + symbol)^{-1} F_k, throwing when a mode is singular
std::vector<Complex> invert_multiplier(double theta, Complex z, const MultiplierGrid& grid,
                                       const std::vector<Complex>& coeffs) {
  std::vector<Complex> out(coeffs.size());
  double worst = std::numeric_limits<double>::infinity(), worst_h = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const Complex m = theta + gamma_symbol(grid.frequency(k), z);
    if (std::abs(m) < worst) {
      worst = std::abs(m);
      worst_h = grid.frequency(k);
    }
    out[k] = coeffs[k] / m;
  }
  if (!(worst > singular_threshold))
    throw GammaSingularError("theta + Gamma(z) is singular at frequency h = " + std::to_string(worst_h), worst);
  return out;
}

// G(z) applied to boundary coefficients on `grid` for a line at the spatial origin
Complex correction_value(Complex z, const MultiplierGrid& grid, const std::vector<Complex>& c, const Vec4& q) {
  const double r = norm3(spatial(q));
  if (r == 0.0) throw DomainError("resolvent correction is singular on the line");
  Complex v(0.0, 0.0);
  const std::vector<char> on = active_modes(c);
  for (int k = 0; k < grid.size(); ++k) {
    if (!on[k]) continue;
    const double h = grid.frequency(k);
    v += c[k] * std::exp(Complex(0.0, h * (q[0] - grid.center()))) * radial::green_value(sqrt_principal(z - h * h), r);
  }
  return v / static_cast<double>(grid.size());
}

}  // namespace

Complex gamma_symbol(double h, Complex z) { return sqrt_principal(z - h * h) / four_pi; }

Complex symbol_difference_quadrature(double h, Complex z, Complex w) {
  if (z == w) throw DegenerateInputError("symbol difference needs z != w");
  const Complex a = w - h * h, b = z - h * h;
  sqrt_principal(a);
  sqrt_principal(b);
  const double R = 20.0 * std::max({1.0, std::sqrt(std::abs(a)), std::sqrt(std::abs(b))});
  QuadOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-16;
  o.initial_panels = 16;
  o.max_panels = 20000;
  const Complex body =
      integrate([&](double r) { const double r2 = r * r; return r2 / ((r2 + a) * (r2 + b)); }, 0.0, R, o);
  // tail: sum_m (-1)^m h_m(a, b) R^{-1-2m} / (2m + 1), h_m the complete symmetric polynomial
  Complex tail(0.0, 0.0), hm(1.0, 0.0), apow(1.0, 0.0);
  double rpow = 1.0 / R;
  for (int m = 0; m < 200; ++m) {
    const Complex term = (m % 2 == 0 ? 1.0 : -1.0) * hm * rpow / (2.0 * m + 1.0);
    tail += term;
    if (std::abs(term) < 1e-20 * std::abs(tail)) break;
    apow *= a;
    hm = hm * b + apow;
    rpow /= R * R;
  }
  return (z - w) / (2.0 * pi * pi) * (body + tail);
}

double symbol_difference_check(double h, Complex z, Complex w) {
  return std::abs(symbol_difference_quadrature(h, z, w) - (gamma_symbol(h, z) - gamma_symbol(h, w)));
}

LineConfig::LineConfig(const Vec4& y_, const Vec3& v_, double theta_) : y(y_), v(v_), theta(theta_) {
  if (!(norm3(v) < 1.0)) throw ContractViolation("line velocity must satisfy |v| < 1");
}

double LineConfig::gamma_v() const { return 1.0 / std::sqrt(1.0 - (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])); }

Eigen::Matrix4d LineConfig::boost_matrix() const {
  const double g = gamma_v();
  const double s = norm3(v);
  Eigen::Matrix4d L = Eigen::Matrix4d::Identity();
  if (s == 0.0) return L;
  const Eigen::Vector3d vv(v[0], v[1], v[2]);
  const Eigen::Vector3d n = vv / s;
  L(0, 0) = g;
  L.block<1, 3>(0, 1) = g * vv.transpose();
  L.block<3, 1>(1, 0) = g * vv;
  L.block<3, 3>(1, 1) = Eigen::Matrix3d::Identity() + (g - 1.0) * n * n.transpose();
  return L;
}

Vec4 LineConfig::boost(const Vec4& q) const {
  const Eigen::Vector4d r = boost_matrix() * Eigen::Vector4d(q[0], q[1], q[2], q[3]);
  return {r(0), r(1), r(2), r(3)};
}

Vec4 LineConfig::inverse_boost(const Vec4& q) const {
  LineConfig back;
  back.v = {-v[0], -v[1], -v[2]};
  return back.boost(q);
}

MultiplierGrid::MultiplierGrid(int n, double spacing, double center) : n_(n), dt_(spacing), center_(center) {
  if (n < 4 || (n & (n - 1)) != 0) throw ContractViolation("grid size must be a power of two >= 4");
  if (!(spacing > 0.0)) throw ContractViolation("grid spacing must be positive");
}

MultiplierGrid MultiplierGrid::for_width(double width, double center, int n) {
  return MultiplierGrid(n, 0.25 * width, center);
}

double MultiplierGrid::frequency(int k) const {
  const int kk = k < n_ / 2 ? k : k - n_;
  return 2.0 * pi * kk / (n_ * dt_);
}

std::vector<Complex> MultiplierGrid::symbol_samples(Complex z) const {
  std::vector<Complex> s(n_);
  for (int k = 0; k < n_; ++k) s[k] = gamma_symbol(frequency(k), z);
  return s;
}

std::vector<Complex> MultiplierGrid::forward(const std::vector<Complex>& samples) const {
  if (static_cast<int>(samples.size()) != n_) throw DimensionError("sample count does not match the grid");
  std::vector<Complex> a = samples;
  fft(a, FFTW_FORWARD);
  for (int k = 1; k < n_; k += 2) a[k] = -a[k];
  return a;
}

std::vector<Complex> MultiplierGrid::inverse(const std::vector<Complex>& coeffs) const {
  if (static_cast<int>(coeffs.size()) != n_) throw DimensionError("coefficient count does not match the grid");
  std::vector<Complex> a = coeffs;
  for (int k = 1; k < n_; k += 2) a[k] = -a[k];
  fft(a, FFTW_BACKWARD);
  for (auto& x : a) x /= static_cast<double>(n_);
  return a;
}

Complex MultiplierGrid::interpolate(const std::vector<Complex>& coeffs, double t) const {
  Complex v(0.0, 0.0);
  for (int k = 0; k < n_; ++k) v += coeffs[k] * std::exp(Complex(0.0, frequency(k) * (t - center_)));
  return v / static_cast<double>(n_);
}

double Gaussian1D::value(double t) const {
  const double u = (t - center) / width;
  return std::pow(pi * width * width, -0.25) * std::exp(-0.5 * u * u);
}

double Gaussian3D::value(const Vec3& x) const { return radial::gaussian_value(width, distance(x, center)); }

double Separable::value(const Vec4& q) const { return phi.value(q[0]) * varphi.value(spatial(q)); }

std::vector<std::string> alias_warnings(const MultiplierGrid& grid, double width) {
  std::vector<std::string> w;
  if (grid.period() < 12.0 * width)
    w.push_back("AliasWarning: grid period " + std::to_string(grid.period()) + " is shorter than 12 widths");
  // the Gaussian spectrum exp(-width^2 h^2 / 2) must be below 1e-16 at the Nyquist frequency
  if (width * grid.nyquist() < std::sqrt(2.0 * 37.0))
    w.push_back("AliasWarning: spacing " + std::to_string(grid.spacing()) + " under-resolves width " +
                std::to_string(width));
  return w;
}

namespace {

std::vector<Complex> time_coefficients(const Gaussian1D& phi, const MultiplierGrid& grid) {
  std::vector<Complex> f(grid.size());
  for (int j = 0; j < grid.size(); ++j) f[j] = phi.value(grid.time(j));
  std::vector<Complex> c = grid.forward(f);
  const std::vector<char> on = active_modes(c);
  for (std::size_t k = 0; k < c.size(); ++k)
    if (!on[k]) c[k] = 0.0;
  return c;
}

}  // namespace

SampledField gbreve_separable(Complex z, const Gaussian1D& phi, const Gaussian3D& varphi, const MultiplierGrid& grid) {
  SampledField out;
  out.warnings = alias_warnings(grid, phi.width);
  std::vector<Complex> c = time_coefficients(phi, grid);
  const double r = norm3(varphi.center);
  parallel_for(c.size(), [&](std::size_t k) {
    if (c[k] == Complex(0.0)) return;
    const double h = grid.frequency(static_cast<int>(k));
    c[k] *= radial::free_resolvent_gaussian(z - h * h, varphi.width, r);
  });
  out.samples = grid.inverse(c);
  return out;
}

std::vector<Complex> free_resolvent_separable(Complex z, const Separable& data, const MultiplierGrid& grid,
                                              const std::vector<Vec4>& points) {
  const std::vector<Complex> c = time_coefficients(data.phi, grid);
  std::vector<int> modes;
  for (int k = 0; k < grid.size(); ++k)
    if (c[k] != Complex(0.0)) modes.push_back(k);
  // spatial factors depend on the point only through its distance to the center
  std::map<double, std::size_t> radius_index;
  std::vector<double> radii;
  std::vector<std::size_t> point_radius(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = distance(spatial(points[i]), data.varphi.center);
    auto it = radius_index.find(r);
    if (it == radius_index.end()) {
      it = radius_index.emplace(r, radii.size()).first;
      radii.push_back(r);
    }
    point_radius[i] = it->second;
  }
  const std::size_t nm = modes.size();
  std::vector<Complex> u(radii.size() * nm);
  parallel_for(u.size(), [&](std::size_t idx) {
    const std::size_t ri = idx / nm, mi = idx % nm;
    const double h = grid.frequency(modes[mi]);
    u[idx] = radial::free_resolvent_gaussian(z - h * h, data.varphi.width, radii[ri]);
  });
  std::vector<Complex> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Complex v(0.0, 0.0);
    for (std::size_t mi = 0; mi < nm; ++mi) {
      const int k = modes[mi];
      v += c[k] * u[point_radius[i] * nm + mi] *
           std::exp(Complex(0.0, grid.frequency(k) * (points[i][0] - grid.center())));
    }
    out[i] = v / static_cast<double>(grid.size());
  }
  return out;
}

InvertibilityBound invertibility_bound(double theta, Complex z, const MultiplierGrid& grid) {
  InvertibilityBound b;
  b.min_modulus = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid.size(); ++k) {
    const double h = grid.frequency(k);
    const double m = std::abs(theta + gamma_symbol(h, z));
    if (m < b.min_modulus) {
      b.min_modulus = m;
      b.worst_frequency = h;
    }
  }
  b.lower_bound = std::abs(sqrt_principal(z).imag()) / four_pi;
  b.holds = b.min_modulus >= b.lower_bound * (1.0 - 1e-12);
  return b;
}

std::vector<Complex> line_resolvent_separable(Complex z, const LineConfig& config, const Separable& data,
                                              const std::vector<Vec4>& points, std::optional<MultiplierGrid> grid) {
  if (!config.at_rest()) throw ContractViolation("the direct line solver handles lines at rest only");
  // everything is evaluated in coordinates where the line passes through the origin
  const Separable d = translated(data, config.y);
  const MultiplierGrid g = grid ? *grid : MultiplierGrid::for_width(d.phi.width, d.phi.center);
  std::vector<Vec4> q(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (int a = 0; a < 4; ++a) q[i][a] = points[i][a] - config.y[a];
  std::vector<Complex> out = free_resolvent_separable(z, d, g, q);
  const SampledField trace = gbreve_separable(z, d.phi, d.varphi, g);
  const std::vector<Complex> c = invert_multiplier(config.theta, z, g, g.forward(trace.samples));
  for (std::size_t i = 0; i < q.size(); ++i) out[i] += correction_value(z, g, c, q[i]);
  return out;
}

namespace {

// proper-time grid shared by both routes of a moving line
MultiplierGrid proper_time_grid(const LineConfig& config, const Separable& data) {
  const double gam = config.gamma_v();
  const Vec3& v = config.v;
  const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  const double st = data.phi.width, sx = data.varphi.width;
  if (config.at_rest()) return MultiplierGrid::for_width(st, data.phi.center - config.y[0]);
  // width in proper time of the data restricted to the line
  const double sigma_s = 1.0 / (gam * std::sqrt(1.0 / (st * st) + v2 / (sx * sx)));
  return MultiplierGrid::for_width(sigma_s, (data.phi.center - config.y[0]) / gam);
}

std::vector<Complex> assemble(const LineConfig& config, Complex z, const MultiplierGrid& sgrid,
                              const std::vector<Complex>& trace, const std::vector<Complex>& free,
                              const std::vector<Vec4>& rest) {
  const std::vector<Complex> c = invert_multiplier(config.theta, z, sgrid, sgrid.forward(trace));
  std::vector<Complex> total(rest.size());
  for (std::size_t i = 0; i < rest.size(); ++i) total[i] = free[i] + correction_value(z, sgrid, c, rest[i]);
  return total;
}

std::vector<Vec4> line_nodes(const MultiplierGrid& sgrid) {
  std::vector<Vec4> nodes(sgrid.size());
  for (int j = 0; j < sgrid.size(); ++j) nodes[j] = {sgrid.time(j), 0.0, 0.0, 0.0};
  return nodes;
}

Vec4 to_lab(const LineConfig& config, const Vec4& rest) {
  const Vec4 b = config.boost(rest);
  return {b[0] + config.y[0], b[1] + config.y[1], b[2] + config.y[2], b[3] + config.y[3]};
}

// lab-frame free resolvent of the separable data, traced along y + w s
std::vector<Complex> direct_route(const LineConfig& config, Complex z, const Separable& data,
                                  const MultiplierGrid& sgrid, const std::vector<Vec4>& rest) {
  const MultiplierGrid lab = MultiplierGrid::for_width(data.phi.width, data.phi.center);
  std::vector<Vec4> along, points;
  for (const Vec4& q : line_nodes(sgrid)) along.push_back(to_lab(config, q));
  for (const Vec4& q : rest) points.push_back(to_lab(config, q));
  const std::vector<Complex> trace = free_resolvent_separable(z, data, lab, along);
  const std::vector<Complex> free = free_resolvent_separable(z, data, lab, points);
  return assemble(config, z, sgrid, trace, free, rest);
}

// data pulled back to the rest frame of the line, v = 0 model there
std::vector<Complex> conjugated_route(const LineConfig& config, Complex z, const Separable& data,
                                      const MultiplierGrid& sgrid, const std::vector<Vec4>& rest) {
  std::vector<Complex> trace, free;
  if (config.at_rest()) {
    const Separable d = translated(data, config.y);
    // same evaluation as the direct route, so the identity conjugation is exact
    trace = free_resolvent_separable(z, d, sgrid, line_nodes(sgrid));
    free = free_resolvent_separable(z, d, sgrid, rest);
  } else {
    const GaussianResolvent res(Gaussian4D::pulled_back(data, config), z);
    const std::vector<Vec4> nodes = line_nodes(sgrid);
    trace.resize(nodes.size());
    free.resize(rest.size());
    parallel_for(nodes.size(), [&](std::size_t j) { trace[j] = res.value(nodes[j]); });
    parallel_for(rest.size(), [&](std::size_t i) { free[i] = res.value(rest[i]); });
  }
  return assemble(config, z, sgrid, trace, free, rest);
}

}  // namespace

std::vector<Complex> line_resolvent(Complex z, const LineConfig& config, const Separable& data,
                                    const std::vector<Vec4>& points) {
  if (config.at_rest()) return line_resolvent_separable(z, config, data, points);
  std::vector<Vec4> rest;
  for (const Vec4& p : points)
    rest.push_back(config.inverse_boost({p[0] - config.y[0], p[1] - config.y[1], p[2] - config.y[2], p[3] - config.y[3]}));
  return direct_route(config, z, data, proper_time_grid(config, data), rest);
}

BoostCheck boost_covariance_check(const LineConfig& config, Complex z, const Separable& data, int samples) {
  if (samples < 1) throw ContractViolation("boost check needs at least one sample point");
  const MultiplierGrid sgrid = proper_time_grid(config, data);
  const double sigma_s = 4.0 * sgrid.spacing();

  // sample points fixed in the rest frame of the line, then mapped to the lab
  BoostCheck out;
  std::vector<Vec4> rest(samples);
  for (int i = 0; i < samples; ++i) {
    const double s = sgrid.center() + (i - 0.5 * (samples - 1)) * 0.5 * sigma_s;
    const double r = 0.6 + 0.8 * (samples == 1 ? 0.5 : static_cast<double>(i) / (samples - 1));
    const double cz = 1.0 - 2.0 * (i + 0.5) / samples;
    const double ph = 2.399963229728653 * i;  // golden angle
    const double rho = std::sqrt(1.0 - cz * cz);
    rest[i] = {s, r * rho * std::cos(ph), r * rho * std::sin(ph), r * cz};
    out.points.push_back(to_lab(config, rest[i]));
  }
  out.conjugated = conjugated_route(config, z, data, sgrid, rest);
  out.direct = direct_route(config, z, data, sgrid, rest);
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < samples; ++i) {
    diff = std::max(diff, std::abs(out.conjugated[i] - out.direct[i]));
    scale = std::max(scale, std::abs(out.direct[i]));
  }
  out.residual = scale > 0.0 ? diff / scale : diff;
  return out;
}

void LineState::add(const LineAtom& a) {
  for (auto& b : atoms_) {
    if (b.source.kind == a.source.kind && b.source.center == a.source.center && b.source.width == a.source.width &&
        b.poles == a.poles && b.coef.size() == a.coef.size()) {
      for (std::size_t k = 0; k < a.coef.size(); ++k) b.coef[k] += a.coef[k];
      return;
    }
  }
  atoms_.push_back(a);
}

LineState LineState::scaled(Complex c) const {
  LineState s;
  for (auto a : atoms_) {
    for (auto& x : a.coef) x *= c;
    s.add(a);
  }
  return s;
}

LineSystem::LineSystem(MultiplierGrid grid, Vec3 position) : grid_(grid), position_(position) {
  std::mt19937_64 rng(0x11e5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (cloud_.size() < 64) {
    const Vec3 x{position_[0] + 2.0 * u(rng), position_[1] + 2.0 * u(rng), position_[2] + 2.0 * u(rng)};
    if (distance(x, position_) < 0.25) continue;
    cloud_.push_back({grid_.center() + 0.125 * grid_.period() * u(rng), x[0], x[1], x[2]});
  }
}

std::vector<Complex> LineSystem::mode_poles(const std::vector<Complex>& poles, int k) const {
  const double h = grid_.frequency(k);
  std::vector<Complex> p(poles);
  for (auto& x : p) x -= h * h;
  return p;
}

LineState LineSystem::separable(const Separable& data) const {
  LineState s;
  s.add({time_coefficients(data.phi, grid_), radial::Source::gaussian(data.varphi.center, data.varphi.width), {}});
  return s;
}

Complex LineSystem::value(const LineState& s, const Vec4& q) const {
  const Vec3 x = spatial(q);
  Complex v(0.0, 0.0);
  for (const auto& a : s.atoms()) {
    const double r = distance(x, a.source.center);
    for (int k = 0; k < grid_.size(); ++k) {
      if (a.coef[k] == Complex(0.0)) continue;
      v += a.coef[k] * std::exp(Complex(0.0, grid_.frequency(k) * (q[0] - grid_.center()))) *
           radial::chain_value(a.source, mode_poles(a.poles, k), r);
    }
  }
  return v / static_cast<double>(grid_.size());
}

bool LineSystem::in_resolvent_set(Complex z) const {
  for (int k = 0; k < grid_.size(); ++k) {
    const double h = grid_.frequency(k);
    if (on_branch_cut(z - h * h)) return false;
  }
  return true;
}

LineState LineSystem::r_apply(Complex z, const LineState& phi) const {
  if (!in_resolvent_set(z)) throw ResolventSetError("z - h^2 meets the branch cut for a grid frequency");
  LineState s;
  for (auto a : phi.atoms()) {
    a.poles.push_back(z);
    s.add(a);
  }
  return s;
}

VectorXc LineSystem::gbreve(Complex z, const LineState& phi) const {
  const LineState rz = r_apply(z, phi);
  const int n = grid_.size();
  VectorXc b = VectorXc::Zero(n);
  const double w = std::sqrt(grid_.spacing() / n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    Complex v(0.0, 0.0);
    for (const auto& a : rz.atoms()) {
      if (a.coef[k] == Complex(0.0)) continue;
      v += a.coef[k] * radial::chain_value(a.source, mode_poles(a.poles, static_cast<int>(k)), distance(position_, a.source.center));
    }
    b(static_cast<Eigen::Index>(k)) = w * v;
  });
  return b;
}

LineState LineSystem::g_apply(Complex z, const VectorXc& xi) const {
  if (!in_resolvent_set(z)) throw ResolventSetError("z - h^2 meets the branch cut for a grid frequency");
  const int n = grid_.size();
  const double w = std::sqrt(n / grid_.spacing());
  std::vector<Complex> c(n);
  for (int k = 0; k < n; ++k) c[k] = w * xi(k);
  LineState s;
  s.add({c, radial::Source::delta(position_), {z}});
  return s;
}

MatrixXc LineSystem::gamma(Complex z) const {
  const std::vector<Complex> s = grid_.symbol_samples(z);
  MatrixXc g = MatrixXc::Zero(grid_.size(), grid_.size());
  for (int k = 0; k < grid_.size(); ++k) g(k, k) = s[k];
  return g;
}

double LineSystem::norm(const LineState& phi) const {
  std::vector<double> v(cloud_.size());
  parallel_for(cloud_.size(), [&](std::size_t i) { v[i] = std::norm(value(phi, cloud_[i])); });
  double s = 0.0;
  for (double x : v) s += x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

Complex LineSystem::inner(const LineState& a, const LineState& b) const {
  const int n = grid_.size();
  std::vector<Complex> per(n, Complex(0.0));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    Complex s(0.0, 0.0);
    for (const auto& x : a.atoms())
      for (const auto& y : b.atoms()) {
        if (x.coef[k] == Complex(0.0) || y.coef[k] == Complex(0.0)) continue;
        const int kk = static_cast<int>(k);
        s += std::conj(x.coef[k]) * y.coef[k] *
             radial::chain_inner(x.source, mode_poles(x.poles, kk), y.source, mode_poles(y.poles, kk));
      }
    per[k] = s;
  });
  Complex total(0.0, 0.0);
  for (const auto& s : per) total += s;
  return grid_.spacing() / n * total;
}

LineState LineSystem::combine(Complex a, const LineState& x, Complex b, const LineState& y) const {
  LineState s = x.scaled(a);
  const LineState yb = y.scaled(b);
  for (const auto& atom : yb.atoms()) s.add(atom);
  return s;
}

std::vector<LineState> LineSystem::probe_states(std::size_t count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed ^ 0x6c69'6e65ULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<LineState> out;
  const double w0 = 4.0 * grid_.spacing();
  for (std::size_t i = 0; i < count; ++i) {
    Separable d;
    d.phi = {grid_.center() + w0 * u(rng), w0 * (1.1 + 0.1 * u(rng))};
    d.varphi = {{position_[0] + u(rng), position_[1] + u(rng), position_[2] + u(rng)}, 0.9 + 0.3 * u(rng)};
    out.push_back(separable(d));
  }
  return out;
}

double hermitian_pairing_residual(Complex z, const Separable& data, const std::vector<Complex>& xi,
                                  const MultiplierGrid& grid) {
  const std::vector<Complex> g = gbreve_separable(std::conj(z), data.phi, data.varphi, grid).samples;
  Complex lhs(0.0, 0.0);
  double xi2 = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    lhs += std::conj(g[j]) * xi[j];
    xi2 += std::norm(xi[j]);
  }
  lhs *= grid.spacing();
  const LineSystem sys(grid);
  const std::vector<Complex> c = grid.forward(xi);
  VectorXc b(grid.size());
  const double w = std::sqrt(grid.spacing() / grid.size());
  for (int k = 0; k < grid.size(); ++k) b(k) = w * c[k];
  const Complex rhs = sys.inner(sys.separable(data), sys.g_apply(z, b));
  return std::abs(lhs - rhs) / std::sqrt(grid.spacing() * xi2);
}

double correction_norm(double theta, Complex z, const Separable& data, const MultiplierGrid& grid) {
  const LineSystem sys(grid);
  VectorXc b = sys.gbreve(z, sys.separable(data));
  for (int k = 0; k < grid.size(); ++k) {
    const Complex m = theta + gamma_symbol(grid.frequency(k), z);
    if (!(std::abs(m) > singular_threshold)) throw GammaSingularError("theta + Gamma(z) is singular", std::abs(m));
    b(k) /= m;
  }
  const LineState corr = sys.g_apply(z, b);
  return std::sqrt(std::abs(sys.inner(corr, corr)));
}

double dominant_theta_slope(Complex z, const Separable& data, const MultiplierGrid& grid,
                            const std::vector<double>& thetas) {
  if (thetas.size() < 2) throw ContractViolation("slope needs at least two couplings");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double t : thetas) {
    const double x = std::log(t), y = std::log(correction_norm(t, z, data, grid));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(thetas.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace krein::dalembert
