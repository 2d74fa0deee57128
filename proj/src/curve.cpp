#include "krein/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "krein/errors.hpp"
#include "krein/linalg.hpp"
#include "krein/parallel.hpp"
#include "krein/quadrature.hpp"
#include "krein/simd.hpp"

namespace krein::curve {

namespace {

QuadOptions curve_quad() {
  QuadOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-15;
  return o;
}

// x - sin x for x >= 0
double x_minus_sin(double x) {
  if (x > 0.1) return x - std::sin(x);
  const double x2 = x * x;
  // x^3/6 - x^5/120 + x^7/5040 - x^9/362880
  return x * x2 * (1.0 / 6.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 5040.0 - x2 / 362880.0)));
}

void require_nodes(int n) {
  if (n < 4) throw ContractViolation("a curve needs at least 4 nodes");
}

}  // namespace

CurveModel::CurveModel(CurveKind k, bool closed, double length, int n, std::function<Vec3(double)> g)
    : kind_(k), closed_(closed), length_(length), n_(n), gamma_(std::move(g)) {}

CurveModel CurveModel::circle(double radius, int n) {
  if (!(radius > 0.0)) throw DomainError("circle radius must be positive");
  require_nodes(n);
  CurveModel c(CurveKind::circle, true, 2.0 * pi * radius, n, [radius](double t) {
    return Vec3{radius * std::cos(t / radius), radius * std::sin(t / radius), 0.0};
  });
  c.radius_ = radius;
  c.curvature_bound_ = 1.0 / radius;
  c.validate();
  return c;
}

CurveModel CurveModel::segment(double length, int n) {
  if (!(length > 0.0)) throw DomainError("segment length must be positive");
  require_nodes(n);
  CurveModel c(CurveKind::segment, false, length, n, [](double t) { return Vec3{t, 0.0, 0.0}; });
  c.curvature_bound_ = 0.0;
  c.validate();
  return c;
}

CurveModel CurveModel::helix(double radius, double pitch, double turns, int n) {
  if (!(radius > 0.0) || !(turns > 0.0)) throw DomainError("helix radius and turns must be positive");
  require_nodes(n);
  const double b = pitch / (2.0 * pi);
  const double rho = std::hypot(radius, b);
  CurveModel c(CurveKind::helix, false, turns * 2.0 * pi * rho, n, [radius, b, rho](double t) {
    return Vec3{radius * std::cos(t / rho), radius * std::sin(t / rho), b * t / rho};
  });
  c.curvature_bound_ = radius / (rho * rho);
  c.validate();
  return c;
}

CurveModel CurveModel::samples(const std::vector<Vec3>& points, int n) {
  const std::size_t m = points.size();
  if (m < 4) throw ContractViolation("sampled curves need at least 4 points");
  require_nodes(n);
  // trigonometric interpolant in tau in [0, 1)
  const int half = static_cast<int>(m / 2);
  const bool even = m % 2 == 0;
  std::vector<int> ks;
  for (int k = -half; k <= half; ++k)
    if (!(even && std::abs(k) == half)) ks.push_back(k);
  std::vector<std::array<Complex, 3>> coef(ks.size());
  std::array<double, 3> nyq{0.0, 0.0, 0.0};
  for (std::size_t q = 0; q < ks.size(); ++q) {
    coef[q] = {Complex(0.0), Complex(0.0), Complex(0.0)};
    for (std::size_t j = 0; j < m; ++j) {
      const Complex e = std::polar(1.0 / m, -2.0 * pi * ks[q] * static_cast<double>(j) / m);
      for (int a = 0; a < 3; ++a) coef[q][a] += points[j][a] * e;
    }
  }
  if (even)
    for (std::size_t j = 0; j < m; ++j)
      for (int a = 0; a < 3; ++a) nyq[a] += points[j][a] * ((j % 2 == 0) ? 1.0 : -1.0) / m;
  auto eval = [=](double tau) {
    Vec3 p{nyq[0] * std::cos(pi * m * tau), nyq[1] * std::cos(pi * m * tau), nyq[2] * std::cos(pi * m * tau)};
    for (std::size_t q = 0; q < ks.size(); ++q) {
      const Complex e = std::polar(1.0, 2.0 * pi * ks[q] * tau);
      for (int a = 0; a < 3; ++a) p[a] += (coef[q][a] * e).real();
    }
    return p;
  };
  auto speed = [=](double tau) {
    std::array<double, 3> d{-nyq[0] * pi * m * std::sin(pi * m * tau), -nyq[1] * pi * m * std::sin(pi * m * tau),
                            -nyq[2] * pi * m * std::sin(pi * m * tau)};
    for (std::size_t q = 0; q < ks.size(); ++q) {
      const Complex e = Complex(0.0, 2.0 * pi * ks[q]) * std::polar(1.0, 2.0 * pi * ks[q] * tau);
      for (int a = 0; a < 3; ++a) d[a] += (coef[q][a] * e).real();
    }
    return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  };
  // arclength table on a fine tau grid, inverted by Newton steps on the speed
  const int cells = 16 * static_cast<int>(m);
  QuadOptions o;
  o.initial_panels = 1;
  std::vector<double> arc(cells + 1, 0.0);
  for (int i = 0; i < cells; ++i)
    arc[i + 1] = arc[i] + integrate(speed, static_cast<double>(i) / cells, static_cast<double>(i + 1) / cells, o);
  const double length = arc[cells];
  auto tau_of = [arc, cells, length, speed](double t) {
    const double u = t - length * std::floor(t / length);
    const auto it = std::upper_bound(arc.begin(), arc.end(), u);
    const int i = std::clamp(static_cast<int>(it - arc.begin()) - 1, 0, cells - 1);
    double tau = (i + (u - arc[i]) / (arc[i + 1] - arc[i])) / cells;
    const double lo = static_cast<double>(i) / cells;
    QuadOptions q;
    q.initial_panels = 1;
    for (int step = 0; step < 8; ++step) {
      const double err = arc[i] + integrate(speed, lo, tau, q) - u;
      tau -= err / speed(tau);
      if (std::abs(err) < 1e-15 * length) break;
    }
    return tau + std::floor(t / length);
  };
  CurveModel c(CurveKind::samples, true, length, n, [eval, tau_of](double t) { return eval(tau_of(t)); });
  double kmax = 0.0;
  for (int i = 0; i < 4 * static_cast<int>(m); ++i) kmax = std::max(kmax, c.curvature(length * i / (4.0 * m)));
  c.curvature_bound_ = kmax;
  c.validate();
  return c;
}

Vec3 CurveModel::point(double t) const { return gamma_(t); }

double CurveModel::wrap(double u) const {
  if (!closed_) return u;
  return u - length_ * std::round(u / length_);
}

double CurveModel::chord(double t, double u) const {
  u = wrap(u);
  switch (kind_) {
    case CurveKind::circle:
      return 2.0 * radius_ * std::abs(std::sin(u / (2.0 * radius_)));
    case CurveKind::segment:
      return std::abs(u);
    default:
      return distance(gamma_(t + u), gamma_(t));
  }
}

double CurveModel::chord_deficit(double t, double u) const {
  u = wrap(u);
  switch (kind_) {
    case CurveKind::circle:
      return 2.0 * radius_ * x_minus_sin(std::abs(u) / (2.0 * radius_));
    case CurveKind::segment:
      return 0.0;
    default:
      return std::abs(u) - chord(t, u);
  }
}

double CurveModel::curvature(double t) const {
  if (kind_ == CurveKind::circle) return 1.0 / radius_;
  if (kind_ == CurveKind::segment) return 0.0;
  const double h = 1e-4 * length_;
  const Vec3 a = gamma_(t - h), b = gamma_(t), c = gamma_(t + h);
  const Vec3 d2{(a[0] - 2.0 * b[0] + c[0]) / (h * h), (a[1] - 2.0 * b[1] + c[1]) / (h * h),
                (a[2] - 2.0 * b[2] + c[2]) / (h * h)};
  return norm3(d2);
}

void CurveModel::validate() {
  const double hh = length_ / (100.0 * n_);
  for (int i = 0; i < n_; ++i) {
    const double t = node(i);
    const double ratio = distance(gamma_(t + hh), gamma_(t)) / hh;
    if (ratio < 1.0 - 1e-3 || ratio > 1.0 + 1e-9)
      throw ContractViolation("curve is not unit speed: |dgamma/dt| = " + std::to_string(ratio));
  }
  double sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_; ++i)
    for (int j = i + 2; j < n_; ++j) {
      if (closed_ && j - i >= n_ - 1) continue;
      const double u = wrap((j - i) * spacing());
      sep = std::min(sep, distance(gamma_(node(i)), gamma_(node(j))) / std::abs(u));
    }
  separation_ = sep;
  if (sep < 1e-3) throw SelfIntersectionError("curve comes back onto itself (separation ratio " + std::to_string(sep) + ")");
}

double GammaNystrom::hermitian_residual() const { return max_abs(matrix - matrix.adjoint()); }

Complex diagonal_scalar(const SpectralPoint& z, const CurveModel& curve, double epsilon, double t) {
  const Complex s = z.root();
  const double kappa = curve.curvature(t);
  const double L = curve.length();
  double u0 = 1e-3 * std::min({1.0, 1.0 / std::abs(s), kappa > 0.0 ? 1.0 / kappa : 1.0});
  u0 = std::min(u0, 0.5 * epsilon);
  const QuadOptions o = curve_quad();

  Complex total = std::log(1.0 / epsilon) / (2.0 * pi);
  for (int side : {1, -1}) {
    const double U = curve.closed() ? 0.5 * L : (side > 0 ? L - t : t);
    const double a = std::min(u0, U);
    total += (s * a - (s * s / 2.0 + kappa * kappa / 24.0) * a * a / 2.0 + s * s * s * a * a * a / 18.0) / four_pi;
    const double m = std::min(epsilon, U);
    if (m > a) {
      total += integrate(
          [&](double u) {
            const double c = curve.chord(t, side * u);
            const double def = curve.chord_deficit(t, side * u);
            return (-def / (u * c) - expm1c(-s * c) / c) / four_pi;
          },
          a, m, o);
    }
    if (U > epsilon) {
      total -= integrate(
          [&](double u) {
            const double c = curve.chord(t, side * u);
            return std::exp(-s * c) / (four_pi * c);
          },
          epsilon, U, o);
    }
  }
  return total;
}

namespace {

void check_epsilon(const CurveModel& curve, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < curve.length() / 4.0))
    throw EpsilonRangeError("epsilon must lie in (0, L/4)");
}

double default_epsilon(const CurveModel& curve, double epsilon) { return epsilon > 0.0 ? epsilon : curve.length() / 20.0; }

// node-pair chords, symmetric, zero on the diagonal
Eigen::MatrixXd chord_matrix(const CurveModel& curve) {
  const int n = curve.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = curve.chord(curve.node(i), (j - i) * curve.spacing());
  return d;
}

// Nystrom matrix of a smooth-plus-kink kernel K(d): h K(d_ij) off the diagonal,
// h K(0) + h^2 K'(0)/6 on it (trapezoid with the |u| kink at the node removed).
template <class K>
MatrixXc kernel_nystrom(const CurveModel& curve, const Eigen::MatrixXd& d, K&& kernel, Complex k0, Complex k1) {
  const int n = curve.size();
  const double h = curve.spacing();
  MatrixXc m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = i == j ? h * k0 + h * h * k1 / 6.0 : h * kernel(d(i, j));
  return m;
}

}  // namespace

GammaNystrom build_gamma_tilde(const SpectralPoint& z, const CurveModel& curve, double epsilon) {
  check_epsilon(curve, epsilon);
  const int n = curve.size();
  const double h = curve.spacing();
  const Eigen::MatrixXd d = chord_matrix(curve);
  GammaNystrom out;
  out.z = z.value();
  out.epsilon = epsilon;
  out.weights.assign(n, h);
  out.matrix = MatrixXc::Zero(n, n);
  std::vector<Complex> diag(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) { diag[i] = diagonal_scalar(z, curve, epsilon, curve.node(static_cast<int>(i))); });

  std::vector<double> r(n);
  std::vector<Complex> g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r[j] = j == i ? 1.0 : d(i, j);
    simd::green_batch(z.root(), r, g);
    for (int j = i + 1; j < n; ++j) out.matrix(i, j) = out.matrix(j, i) = -h * g[j];
  }
  for (int i = 0; i < n; ++i) {
    Complex off(0.0, 0.0);
    for (int j = 0; j < n; ++j)
      if (j != i) off -= out.matrix(i, j);
    out.matrix(i, i) = diag[i] + off;
  }
  return out;
}

double gamma_difference_residual(const SpectralPoint& z, const SpectralPoint& w, const CurveModel& curve) {
  if (z.value() == w.value()) throw DegenerateInputError("difference check needs z != w");
  const double eps = default_epsilon(curve, -1.0);
  const MatrixXc diff = build_gamma_tilde(z, curve, eps).matrix - build_gamma_tilde(w, curve, eps).matrix;
  const Complex sz = z.root(), sw = w.root();
  const auto kernel = [&](double r) { return (std::exp(-sw * r) - std::exp(-sz * r)) / (four_pi * r); };
  const MatrixXc ref =
      kernel_nystrom(curve, chord_matrix(curve), kernel, (sz - sw) / four_pi, (w.value() - z.value()) / (8.0 * pi));
  return max_abs(diff - ref);
}

double gamma_derivative_residual(const SpectralPoint& z, const CurveModel& curve) {
  const double eps = default_epsilon(curve, -1.0);
  const double step = 1e-5 * std::abs(z.value());
  const MatrixXc fd = (build_gamma_tilde(z.value() + step, curve, eps).matrix -
                       build_gamma_tilde(z.value() - step, curve, eps).matrix) /
                      (2.0 * step);
  const Complex s = z.root();
  const auto kernel = [&](double r) { return std::exp(-s * r) / (8.0 * pi * s); };
  const MatrixXc ref = kernel_nystrom(curve, chord_matrix(curve), kernel, 1.0 / (8.0 * pi * s), Complex(-1.0 / (8.0 * pi)));
  return max_abs(fd - ref);
}

CurveBoundStates curve_bound_states(const CurveModel& curve, double beta, double a, double b, int resolution,
                                    double epsilon) {
  if (!(a > 0.0)) throw IntervalError("bound-state interval must lie in (0, inf)");
  if (resolution < 16) throw ContractViolation("bound-state search needs resolution >= 16");
  const double eps = default_epsilon(curve, epsilon);
  check_epsilon(curve, eps);
  const auto family = [&](double lam) {
    MatrixXc m = build_gamma_tilde(lam, curve, eps).matrix;
    m.diagonal().array() += beta;
    return m;
  };
  TrackOptions opt;
  opt.max_curves = 1;
  const TrackResult tr = track_roots(family, a, b, resolution, opt);
  CurveBoundStates out;
  out.warnings = tr.warnings;
  out.monotone = tr.monotone;
  for (const auto& r : tr.roots) {
    CurveRoot root;
    root.lambda = r.lambda;
    root.multiplicity = r.multiplicity;
    root.residual = r.residual;
    VectorXc v = r.kernel.col(0);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    v *= std::abs(v(imax)) / v(imax);
    root.eigenvector = v / v.norm();
    out.roots.push_back(std::move(root));
  }
  return out;
}

std::vector<SpectrumSample> curve_spectrum(const CurveModel& curve, double beta, const std::vector<double>& grid,
                                           double epsilon) {
  const double eps = default_epsilon(curve, epsilon);
  check_epsilon(curve, eps);
  std::vector<SpectrumSample> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    MatrixXc m = build_gamma_tilde(grid[i], curve, eps).matrix;
    m.diagonal().array() += beta;
    const Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    out[i] = {grid[i], es.eigenvalues()(0)};
  }
  return out;
}

double condition18_estimate(const CurveModel& curve, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("condition estimate needs lambda > 0");
  const double L = curve.length();
  std::vector<double> vals(curve.size());
  parallel_for(vals.size(), [&](std::size_t i) {
    const double t = curve.node(static_cast<int>(i));
    double total = 0.0;
    for (int side : {1, -1}) {
      const double U = curve.closed() ? 0.5 * L : (side > 0 ? L - t : t);
      total += integrate([&](double u) { return std::exp(-lambda * curve.chord(t, side * u)); }, 0.0, U, curve_quad());
    }
    vals[i] = total;
  });
  return *std::max_element(vals.begin(), vals.end());
}

double fourier_mode_overlap(const VectorXc& v) {
  const Eigen::Index n = v.size();
  const double norm2 = v.squaredNorm();
  double best = 0.0;
  for (Eigen::Index k = 0; k <= n / 2; ++k) {
    double p = 0.0;
    for (int sign : {1, -1}) {
      if (sign < 0 && (k == 0 || 2 * k == n)) continue;
      Complex c(0.0, 0.0);
      for (Eigen::Index j = 0; j < n; ++j) c += v(j) * std::polar(1.0, -sign * 2.0 * pi * k * j / n);
      p += std::norm(c) / n;
    }
    best = std::max(best, p / norm2);
  }
  return best;
}

}  // namespace krein::curve
