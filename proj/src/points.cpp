#include "krein/points.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "krein/simd.hpp"

namespace krein::points {

PointConfig::PointConfig(std::vector<Vec3> centers, ThetaMatrix theta)
    : centers_(std::move(centers)), theta_(std::move(theta)), d_min_(std::numeric_limits<double>::infinity()) {
  if (centers_.empty()) throw ContractViolation("a point configuration needs at least one center");
  if (theta_.size() != size()) throw DimensionError("Theta size must equal the number of centers");
  for (std::size_t j = 0; j < centers_.size(); ++j)
    for (std::size_t k = j + 1; k < centers_.size(); ++k) d_min_ = std::min(d_min_, distance(centers_[j], centers_[k]));
  if (!(d_min_ > 0.0)) throw ContractViolation("centers must be pairwise distinct");
}

PointConfig PointConfig::scaled(double s) const {
  std::vector<Vec3> c = centers_;
  for (auto& p : c)
    for (double& v : p) v *= s;
  return PointConfig(std::move(c), ThetaMatrix(theta_.matrix() / s));
}

Complex green_kernel(const SpectralPoint& z, const Vec3& x) {
  const double r = norm3(x);
  if (r == 0.0) throw DomainError("Green function is singular at the origin");
  return radial::green_value(z.root(), r);
}

MatrixXc gamma_free(const SpectralPoint& z, const std::vector<Vec3>& centers) {
  const Eigen::Index n = static_cast<Eigen::Index>(centers.size());
  MatrixXc g(n, n);
  std::vector<double> d(n);
  std::vector<Complex> row(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) d[k] = k == j ? 1.0 : distance(centers[j], centers[k]);
    simd::green_batch(z.root(), d, row);
    for (Eigen::Index k = 0; k < n; ++k) g(j, k) = k == j ? z.root() / four_pi : -row[k];
  }
  // symmetric by construction; copy the upper triangle so the real-axis matrix is exactly Hermitian
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < j; ++k) g(j, k) = g(k, j);
  return g;
}

MatrixXc gamma_matrix(const SpectralPoint& z, const PointConfig& config) {
  return config.theta().matrix() + gamma_free(z, config.centers());
}

MatrixXc gamma_derivative(const SpectralPoint& z, const std::vector<Vec3>& centers) {
  const Eigen::Index n = static_cast<Eigen::Index>(centers.size());
  const Complex s = z.root();
  MatrixXc g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = j == k ? 0.0 : distance(centers[j], centers[k]);
      g(j, k) = std::exp(-s * d) / (8.0 * pi * s);
    }
  return g;
}

double gamma_derivative_check(const SpectralPoint& z, const PointConfig& config) {
  const double h = 1e-5 * std::abs(z.value());
  const MatrixXc fd = (gamma_matrix(z.value() + h, config) - gamma_matrix(z.value() - h, config)) / (2.0 * h);
  return max_abs(fd - gamma_derivative(z, config.centers()));
}

BoundStateSearch bound_states(const PointConfig& config, double a, double b, int resolution) {
  if (!(a > 0.0)) throw IntervalError("bound-state interval must lie in (0, inf)");
  if (resolution < 16) throw ContractViolation("bound-state search needs resolution >= 16");
  const HermitianFamily family = [&](double lam) { return gamma_matrix(lam, config); };
  const TrackResult tr = track_roots(family, a, b, resolution);
  BoundStateSearch out;
  out.warnings = tr.warnings;
  out.monotone = tr.monotone;
  for (const auto& r : tr.roots) {
    BoundState s;
    s.z_star = r.lambda;
    s.kernel = r.kernel;
    s.multiplicity = r.multiplicity;
    VectorXc c = r.kernel.col(0);
    Eigen::Index imax = 0;
    c.cwiseAbs().maxCoeff(&imax);
    c *= std::abs(c(imax)) / c(imax);
    c /= c.norm();
    s.coefficients = c;
    s.residual = (gamma_matrix(s.z_star, config) * c).norm();
    out.states.push_back(std::move(s));
  }
  return out;
}

Complex eigenfunction_eval(const BoundState& state, const PointConfig& config, const Vec3& x) {
  const SpectralPoint z(state.z_star);
  Complex v(0.0, 0.0);
  for (Eigen::Index j = 0; j < config.size(); ++j) {
    const double r = distance(x, config.centers()[j]);
    if (r == 0.0) throw DomainError("eigenfunction is singular at the centers");
    v += state.coefficients(j) * radial::green_value(z.root(), r);
  }
  return v;
}

FdResidual eigenfunction_fd_residual(const BoundState& state, const PointConfig& config, double spacing,
                                     double exclusion, double margin) {
  const auto& cs = config.centers();
  Vec3 lo = cs.front(), hi = cs.front();
  for (const auto& c : cs)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  std::array<int, 3> n{};
  for (int a = 0; a < 3; ++a) {
    lo[a] -= margin;
    hi[a] += margin;
    n[a] = static_cast<int>(std::floor((hi[a] - lo[a]) / spacing + 1e-9)) + 1;
  }
  const double s = std::sqrt(state.z_star);
  const std::size_t plane = static_cast<std::size_t>(n[1]) * n[2];

  std::vector<double> sx, sy, sz, cre, cim;
  bool complex_coef = false;
  for (Eigen::Index j = 0; j < config.size(); ++j) {
    sx.push_back(cs[j][0]);
    sy.push_back(cs[j][1]);
    sz.push_back(cs[j][2]);
    cre.push_back(state.coefficients(j).real());
    cim.push_back(state.coefficients(j).imag());
    complex_coef = complex_coef || state.coefficients(j).imag() != 0.0;
  }
  const simd::PointsSoA sources{sx, sy, sz};

  std::vector<double> ty(plane), tz(plane);
  for (int j = 0; j < n[1]; ++j)
    for (int k = 0; k < n[2]; ++k) {
      ty[static_cast<std::size_t>(j) * n[2] + k] = lo[1] + j * spacing;
      tz[static_cast<std::size_t>(j) * n[2] + k] = lo[2] + k * spacing;
    }

  constexpr int radius = 3;
  constexpr double w[4] = {-49.0 / 18.0, 1.5, -3.0 / 20.0, 1.0 / 90.0};
  // seven-plane ring buffer of psi values
  std::vector<std::vector<Complex>> ring(2 * radius + 1, std::vector<Complex>(plane));
  std::vector<double> tx(plane), re(plane), im(plane);
  auto fill = [&](int i, std::vector<Complex>& dst) {
    std::fill(tx.begin(), tx.end(), lo[0] + i * spacing);
    const simd::PointsSoA targets{tx, ty, tz};
    simd::yukawa_sum(s, sources, cre, targets, re);
    if (complex_coef)
      simd::yukawa_sum(s, sources, cim, targets, im);
    else
      std::fill(im.begin(), im.end(), 0.0);
    for (std::size_t p = 0; p < plane; ++p) dst[p] = Complex(re[p], im[p]);
  };

  double res2 = 0.0, psi2 = 0.0;
  std::size_t count = 0;
  const double h2 = spacing * spacing;
  const double ex2 = exclusion * exclusion;
  for (int i = 0; i < n[0]; ++i) {
    fill(i, ring[i % (2 * radius + 1)]);
    const int ic = i - radius;  // plane whose stencil is now complete
    if (ic < radius) continue;
    auto pl = [&](int off) -> const std::vector<Complex>& { return ring[(ic + off) % (2 * radius + 1)]; };
    const double x = lo[0] + ic * spacing;
    for (int j = radius; j < n[1] - radius; ++j)
      for (int k = radius; k < n[2] - radius; ++k) {
        const double y = lo[1] + j * spacing, z = lo[2] + k * spacing;
        bool near = false;
        for (const auto& c : cs) {
          const double dx = x - c[0], dy = y - c[1], dz = z - c[2];
          if (dx * dx + dy * dy + dz * dz < ex2) near = true;
        }
        if (near) continue;
        const std::size_t p = static_cast<std::size_t>(j) * n[2] + k;
        const Complex psi = pl(0)[p];
        Complex lap = 3.0 * w[0] * psi;
        for (int m = 1; m <= radius; ++m) {
          lap += w[m] * (pl(m)[p] + pl(-m + 2 * radius + 1)[p]);
          lap += w[m] * (pl(0)[p + static_cast<std::size_t>(m) * n[2]] + pl(0)[p - static_cast<std::size_t>(m) * n[2]]);
          lap += w[m] * (pl(0)[p + m] + pl(0)[p - m]);
        }
        lap /= h2;
        const Complex r = -lap + state.z_star * psi;
        res2 += std::norm(r);
        psi2 += std::norm(psi);
        ++count;
      }
  }
  FdResidual out;
  out.relative = std::sqrt(res2 / psi2);
  out.points = count;
  out.spacing = spacing;
  out.exclusion = exclusion;
  return out;
}

Complex resolvent_kernel(const SpectralPoint& z, const PointConfig& config, const Vec3& x, const Vec3& xp) {
  const double r = distance(x, xp);
  if (r == 0.0) throw DomainError("resolvent kernel is singular on the diagonal x = x'");
  const Eigen::Index n = config.size();
  VectorXc gx(n), gxp(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = distance(x, config.centers()[j]), b = distance(xp, config.centers()[j]);
    if (a == 0.0 || b == 0.0) throw DomainError("resolvent kernel is singular at the centers");
    gx(j) = radial::green_value(z.root(), a);
    gxp(j) = radial::green_value(z.root(), b);
  }
  const CheckedSolver solver(gamma_matrix(z, config));
  return radial::green_value(z.root(), r) + gx.cwiseProduct(solver.solve(gxp)).sum();
}

Complex free_resolvent_gaussian(const SpectralPoint& z, const Vec3& mu, double sigma, const Vec3& x) {
  return radial::free_resolvent_gaussian(z.value(), sigma, distance(x, mu));
}

VectorXc gbreve_gaussian(const SpectralPoint& z, const PointConfig& config, const Vec3& mu, double sigma) {
  VectorXc out(config.size());
  for (Eigen::Index j = 0; j < config.size(); ++j) out(j) = free_resolvent_gaussian(z, mu, sigma, config.centers()[j]);
  return out;
}

FieldState FieldState::gaussian(const Vec3& mu, double sigma, Complex coef) {
  if (!(sigma > 0.0)) throw DomainError("Gaussian width must be positive");
  FieldState f;
  f.atoms_.push_back({coef, radial::Source::gaussian(mu, sigma), {}});
  return f;
}

void FieldState::add(const Atom& a) {
  if (a.coef == Complex(0.0, 0.0)) return;
  for (auto& b : atoms_) {
    if (b.source.kind == a.source.kind && b.source.center == a.source.center && b.source.width == a.source.width &&
        b.poles == a.poles) {
      b.coef += a.coef;
      return;
    }
  }
  atoms_.push_back(a);
}

FieldState FieldState::scaled(Complex c) const {
  FieldState f;
  for (const auto& a : atoms_) f.add({a.coef * c, a.source, a.poles});
  return f;
}

FieldState FieldState::with_pole(Complex z) const {
  FieldState f;
  for (auto a : atoms_) {
    a.poles.push_back(z);
    f.add(a);
  }
  return f;
}

Complex FieldState::value(const Vec3& x) const {
  Complex v(0.0, 0.0);
  for (const auto& a : atoms_) v += a.coef * radial::chain_value(a.source, a.poles, distance(x, a.source.center));
  return v;
}

namespace {

std::vector<Vec3> make_cloud(const std::vector<Vec3>& centers) {
  Vec3 lo = centers.front(), hi = centers.front();
  for (const auto& c : centers)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> cloud;
  while (cloud.size() < 64) {
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = lo[a] - 1.5 + (hi[a] - lo[a] + 3.0) * u(rng);
    bool near = false;
    for (const auto& c : centers) near = near || distance(p, c) < 0.25;
    if (!near) cloud.push_back(p);
  }
  return cloud;
}

}  // namespace

PointSystem::PointSystem(std::vector<Vec3> centers) : centers_(std::move(centers)) {
  if (centers_.empty()) throw ContractViolation("a point configuration needs at least one center");
  cloud_ = make_cloud(centers_);
}

FieldState PointSystem::r_apply(Complex z, const FieldState& phi) const {
  sqrt_principal(z);
  return phi.with_pole(z);
}

VectorXc PointSystem::gbreve(Complex z, const FieldState& phi) const {
  const FieldState rz = r_apply(z, phi);
  VectorXc out(dim_boundary());
  for (Eigen::Index j = 0; j < dim_boundary(); ++j) out(j) = rz.value(centers_[j]);
  return out;
}

FieldState PointSystem::g_apply(Complex z, const VectorXc& xi) const {
  sqrt_principal(z);
  FieldState f;
  for (Eigen::Index j = 0; j < dim_boundary(); ++j) f.add({xi(j), radial::Source::delta(centers_[j]), {z}});
  return f;
}

MatrixXc PointSystem::gamma(Complex z) const { return gamma_free(SpectralPoint(z), centers_); }

double PointSystem::norm(const FieldState& phi) const {
  std::vector<double> v(cloud_.size());
  parallel_for(cloud_.size(), [&](std::size_t i) { v[i] = std::norm(phi.value(cloud_[i])); });
  double s = 0.0;
  for (double x : v) s += x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

Complex PointSystem::inner(const FieldState& a, const FieldState& b) const {
  Complex s(0.0, 0.0);
  for (const auto& x : a.atoms())
    for (const auto& y : b.atoms()) s += std::conj(x.coef) * y.coef * radial::chain_inner(x.source, x.poles, y.source, y.poles);
  return s;
}

FieldState PointSystem::combine(Complex a, const FieldState& x, Complex b, const FieldState& y) const {
  FieldState f = x.scaled(a);
  for (const auto& atom : y.atoms()) f.add({atom.coef * b, atom.source, atom.poles});
  return f;
}

std::vector<FieldState> PointSystem::probe_states(std::size_t count, std::uint64_t seed) const {
  Vec3 mid{0.0, 0.0, 0.0};
  for (const auto& c : centers_)
    for (int a = 0; a < 3; ++a) mid[a] += c[a] / static_cast<double>(centers_.size());
  std::mt19937_64 rng(seed ^ 0x7072'6f62'65ULL);
  std::uniform_real_distribution<double> off(-1.0, 1.0), width(0.6, 1.2);
  std::vector<FieldState> out;
  for (std::size_t k = 0; k < count; ++k) {
    Vec3 mu;
    for (int a = 0; a < 3; ++a) mu[a] = mid[a] + off(rng);
    out.push_back(FieldState::gaussian(mu, width(rng)));
  }
  return out;
}

}  // namespace krein::points
