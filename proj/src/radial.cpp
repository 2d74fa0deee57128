#include "krein/radial.hpp"

#include <algorithm>

namespace krein::radial {

namespace {

constexpr double gaussian_cutoff = 10.0;       // in widths, exp(-50) below double precision
constexpr double fourier_cutoff_exponent = 46.0;  // exp(-46) ~ 1e-20

Complex pole_product(std::span<const Complex> poles, double k2) {
  Complex m(1.0, 0.0);
  for (const Complex& p : poles) m /= (k2 + p);
  return m;
}

double gaussian_scale(double sigma) { return std::pow(pi * sigma * sigma, -0.75) * sigma * sigma; }

int oscillation_panels(double freq, double length) {
  const double periods = std::abs(freq) * length / pi;
  return std::clamp(static_cast<int>(std::ceil(periods)), 1, 2000);
}

}  // namespace

Complex green_value(Complex s, double r) { return std::exp(-s * r) / (four_pi * r); }

double gaussian_value(double sigma, double r) {
  return std::pow(pi * sigma * sigma, -0.75) * std::exp(-r * r / (2.0 * sigma * sigma));
}

double gaussian_fourier(double sigma, double k) {
  return std::pow(4.0 * pi * sigma * sigma, 0.75) * std::exp(-0.5 * sigma * sigma * k * k);
}

QuadOptions default_options() {
  QuadOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-16;
  return o;
}

Complex free_resolvent_gaussian(Complex p, double sigma, double r, const QuadOptions& o) {
  if (!(sigma > 0.0)) throw DomainError("Gaussian width must be positive");
  const Complex s = sqrt_principal(p);
  const double rho_max = gaussian_cutoff * sigma;
  QuadOptions q = o;
  q.abs_tol = std::max(o.abs_tol, 1e-15 * gaussian_scale(sigma));

  if (r == 0.0) {
    q.initial_panels = oscillation_panels(s.imag(), rho_max);
    return integrate([&](double rho) { return rho * gaussian_value(sigma, rho) * std::exp(-s * rho); }, 0.0,
                     rho_max, q);
  }
  // rho < r and rho > r pieces, each written without growing exponentials
  Complex inner(0.0, 0.0);
  const double r_in = std::min(r, rho_max);
  q.initial_panels = oscillation_panels(s.imag(), r_in);
  inner = integrate(
      [&](double rho) {
        return -rho * gaussian_value(sigma, rho) * std::exp(-s * (r - rho)) * expm1c(-2.0 * s * rho);
      },
      0.0, r_in, q);
  Complex outer(0.0, 0.0);
  if (r < rho_max) {
    q.initial_panels = oscillation_panels(s.imag(), rho_max - r);
    outer = integrate(
        [&](double rho) { return rho * gaussian_value(sigma, rho) * std::exp(-s * (rho - r)); }, r, rho_max, q);
    outer *= -expm1c(-2.0 * s * r);
  }
  return (inner + outer) / (2.0 * s * r);
}

std::vector<Complex> partial_fraction_weights(std::span<const Complex> poles) {
  const std::size_t m = poles.size();
  double scale = 1.0;
  for (const Complex& p : poles) scale = std::max(scale, std::abs(p));
  std::vector<Complex> a(m, Complex(1.0, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const Complex diff = poles[j] - poles[i];
      if (std::abs(diff) < 1e-6 * scale) return {};
      a[i] /= diff;
    }
  return a;
}

Complex chain_value_fourier(const Source& src, std::span<const Complex> poles, double r) {
  for (const Complex& p : poles) sqrt_principal(p);
  QuadOptions q = default_options();
  if (src.kind == SourceKind::gaussian) {
    const double sigma = src.width;
    const double kmax = std::sqrt(2.0 * fourier_cutoff_exponent) / sigma;
    q.abs_tol = 1e-15 * gaussian_scale(sigma);
    q.initial_panels = 8 + oscillation_panels(r, kmax);
    auto f = [&](double k) {
      const double kr = k * r;
      const double sinc = kr == 0.0 ? 1.0 : std::sin(kr) / kr;
      return k * k * sinc * gaussian_fourier(sigma, k) * pole_product(poles, k * k);
    };
    return integrate(f, 0.0, kmax, q) / (2.0 * pi * pi);
  }
  if (poles.size() < 2 && r == 0.0) throw DomainError("Green function of a delta is singular at its center");
  if (r == 0.0) {
    return integrate_to_infinity([&](double k) { return k * k * pole_product(poles, k * k); }, 0.0, q) /
           (2.0 * pi * pi);
  }
  auto f = [&](double k) { return k * pole_product(poles, k * k); };
  return fourier_sine_integral(f, r, q) / (2.0 * pi * pi * r);
}

Complex chain_value(const Source& src, std::span<const Complex> poles, double r) {
  if (poles.empty()) {
    if (src.kind == SourceKind::gaussian) return gaussian_value(src.width, r);
    throw DomainError("bare delta has no pointwise value");
  }
  const std::vector<Complex> a = partial_fraction_weights(poles);
  if (src.kind == SourceKind::gaussian) {
    if (a.empty()) return chain_value_fourier(src, poles, r);
    Complex v(0.0, 0.0);
    for (std::size_t i = 0; i < poles.size(); ++i) v += a[i] * free_resolvent_gaussian(poles[i], src.width, r);
    return v;
  }
  if (poles.size() == 1) {
    if (r == 0.0) throw DomainError("Green function is singular at its center");
    return green_value(sqrt_principal(poles[0]), r);
  }
  if (a.empty()) {
    if (poles.size() == 2) {
      // (-Lap + p)^{-2} delta = -d/dp G_p = exp(-s r) / (8 pi s)
      const Complex s = sqrt_principal(0.5 * (poles[0] + poles[1]));
      return std::exp(-s * r) / (8.0 * pi * s);
    }
    return chain_value_fourier(src, poles, r);
  }
  // the weights sum to zero, so the 1/r parts cancel term by term
  Complex v(0.0, 0.0);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const Complex s = sqrt_principal(poles[i]);
    v += a[i] * (r == 0.0 ? -s : expm1c(-s * r) / r);
  }
  return v / four_pi;
}

Complex chain_inner(const Source& a, std::span<const Complex> poles_a, const Source& b,
                    std::span<const Complex> poles_b) {
  for (const Complex& p : poles_a) sqrt_principal(p);
  for (const Complex& p : poles_b) sqrt_principal(p);
  const double d = distance(a.center, b.center);
  auto profile = [](const Source& s, double k) {
    return s.kind == SourceKind::gaussian ? gaussian_fourier(s.width, k) : 1.0;
  };
  auto weight = [&](double k) {
    const double k2 = k * k;
    return std::conj(pole_product(poles_a, k2)) * pole_product(poles_b, k2) * profile(a, k) * profile(b, k);
  };
  QuadOptions q = default_options();
  const bool ga = a.kind == SourceKind::gaussian, gb = b.kind == SourceKind::gaussian;
  if (ga || gb) {
    const double s2 = (ga ? a.width * a.width : 0.0) + (gb ? b.width * b.width : 0.0);
    const double kmax = std::sqrt(2.0 * fourier_cutoff_exponent / s2);
    q.initial_panels = 8 + oscillation_panels(d, kmax);
    auto f = [&](double k) {
      const double kd = k * d;
      const double sinc = kd == 0.0 ? 1.0 : std::sin(kd) / kd;
      return k * k * sinc * weight(k);
    };
    return integrate(f, 0.0, kmax, q) / (2.0 * pi * pi);
  }
  if (poles_a.size() + poles_b.size() < 2) throw DomainError("delta chains of total degree < 2 are not in L2");
  if (d == 0.0) return integrate_to_infinity([&](double k) { return k * k * weight(k); }, 0.0, q) / (2.0 * pi * pi);
  return fourier_sine_integral([&](double k) { return k * weight(k); }, d, q) / (2.0 * pi * pi * d);
}

}  // namespace krein::radial
