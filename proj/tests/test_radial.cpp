#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>

#include "krein/radial.hpp"

using namespace krein;
using namespace krein::radial;

namespace {

// sum over nested Gauss-Legendre panels of (rho, cos theta) around x; the
// angular integral is done numerically, unlike the library's reduction.
double brute_force_resolvent(double s, double sigma, double dist) {
  using G = boost::math::quadrature::gauss<double, 30>;
  const int rho_panels = 24, mu_panels = 8;
  const double rho_max = dist + 12.0 * sigma;
  double total = 0.0;
  for (int i = 0; i < rho_panels; ++i) {
    const double a = rho_max * i / rho_panels, b = rho_max * (i + 1) / rho_panels;
    auto f = [&](double rho) {
      double ang = 0.0;
      for (int j = 0; j < mu_panels; ++j) {
        const double c0 = -1.0 + 2.0 * j / mu_panels, c1 = -1.0 + 2.0 * (j + 1) / mu_panels;
        ang += G::integrate(
            [&](double c) {
              const double r2 = dist * dist + rho * rho + 2.0 * dist * rho * c;
              return gaussian_value(sigma, std::sqrt(std::max(r2, 0.0)));
            },
            c0, c1);
      }
      // 2 pi from the azimuth, rho^2 / (4 pi rho) from the Green function
      return 2.0 * pi * rho * std::exp(-s * rho) / four_pi * ang;
    };
    total += G::integrate(f, a, b);
  }
  return total;
}

}  // namespace

TEST_CASE("Gaussian normalization and Fourier profile") {
  const double sigma = 0.8;
  const double n2 = integrate([&](double r) { return 4.0 * pi * r * r * std::pow(gaussian_value(sigma, r), 2); }, 0.0,
                              12.0 * sigma);
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
  // Plancherel: int |g^|^2 d^3k / (2 pi)^3 = 1
  const double f2 = integrate(
      [&](double k) { return 4.0 * pi * k * k * std::pow(gaussian_fourier(sigma, k), 2) / std::pow(2.0 * pi, 3); },
      0.0, 12.0 / sigma);
  CHECK(f2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("free resolvent of a Gaussian against brute-force quadrature") {
  const double v = free_resolvent_gaussian(1.0, 1.0, 1.0).real();
  CHECK(std::abs(v - brute_force_resolvent(1.0, 1.0, 1.0)) < 1e-6);
  CHECK(std::abs(free_resolvent_gaussian(1.0, 1.0, 1.0).imag()) < 1e-15);
}

TEST_CASE("free resolvent, wide Gaussian limit") {
  const double sigma = 30.0, r = 2.0;
  const double v = free_resolvent_gaussian(1.0, sigma, r).real();
  const double ref = gaussian_value(sigma, r);
  CHECK(std::abs(v - ref) / ref < 1e-2);
}

TEST_CASE("free resolvent, Fourier route agrees") {
  for (Complex p : {Complex(1.0, 0.0), Complex(2.0, 3.0), Complex(-1.5, 0.5)}) {
    for (double r : {0.0, 0.4, 2.5}) {
      const Complex a = free_resolvent_gaussian(p, 0.9, r);
      const Complex b = chain_value_fourier(Source::gaussian({0, 0, 0}, 0.9), std::vector<Complex>{p}, r);
      CHECK(std::abs(a - b) < 1e-10);
    }
  }
}

TEST_CASE("chains of deltas") {
  const Source d = Source::delta({0.0, 0.0, 0.0});
  const Complex a(1.0, 0.5), b(2.0, -1.0);
  const double r = 0.7;
  const Complex one = chain_value(d, std::vector<Complex>{a}, r);
  CHECK(std::abs(one - std::exp(-sqrt_principal(a) * r) / (four_pi * r)) < 1e-15);
  // two poles: (G_a - G_b) / (b - a)
  const Complex two = chain_value(d, std::vector<Complex>{a, b}, r);
  const Complex ga = std::exp(-sqrt_principal(a) * r) / (four_pi * r), gb = std::exp(-sqrt_principal(b) * r) / (four_pi * r);
  CHECK(std::abs(two - (ga - gb) / (b - a)) < 1e-15);
  // coincident poles: exp(-s r) / (8 pi s)
  const Complex dbl = chain_value(d, std::vector<Complex>{a, a}, r);
  CHECK(std::abs(dbl - std::exp(-sqrt_principal(a) * r) / (8.0 * pi * sqrt_principal(a))) < 1e-15);
  CHECK_THROWS_AS(chain_value(d, std::vector<Complex>{a}, 0.0), DomainError);
  const Complex three = chain_value(d, std::vector<Complex>{a, b, Complex(0.5, 0.1)}, r);
  const Complex three_f = chain_value_fourier(d, std::vector<Complex>{a, b, Complex(0.5, 0.1)}, r);
  CHECK(std::abs(three - three_f) < 1e-10 * std::abs(three));
}

TEST_CASE("inner products of delta chains") {
  const Source d0 = Source::delta({0.0, 0.0, 0.0});
  const Complex a(1.0, 0.5), b(2.0, -1.0);
  // <G_a delta, G_b delta> = 1 / (4 pi (conj sqrt a + sqrt b))
  const Complex ip = chain_inner(d0, std::vector<Complex>{a}, d0, std::vector<Complex>{b});
  CHECK(std::abs(ip - 1.0 / (four_pi * (std::conj(sqrt_principal(a)) + sqrt_principal(b)))) < 1e-12);
  // at distance d: (exp(-sb d) - exp(-conj(sa) d)) / (4 pi d (conj a - b))
  const Source d1 = Source::delta({0.0, 1.2, 0.0});
  const double dist = 1.2;
  const Complex sa = std::conj(sqrt_principal(a)), sb = sqrt_principal(b);
  const Complex ref = (std::exp(-sb * dist) - std::exp(-sa * dist)) / (four_pi * dist * (std::conj(a) - b));
  CHECK(std::abs(chain_inner(d0, std::vector<Complex>{a}, d1, std::vector<Complex>{b}) - ref) < 1e-11);
  CHECK_THROWS_AS(chain_inner(d0, std::vector<Complex>{}, d1, std::vector<Complex>{b}), DomainError);
}

TEST_CASE("partial fraction weights") {
  const std::vector<Complex> p{1.0, 2.0, 4.0};
  const auto w = partial_fraction_weights(p);
  REQUIRE(w.size() == 3);
  // 1/((x+1)(x+2)(x+4)) at x = 3
  Complex s(0.0, 0.0);
  for (int i = 0; i < 3; ++i) s += w[i] / (3.0 + p[i]);
  CHECK(std::abs(s - 1.0 / (4.0 * 5.0 * 7.0)) < 1e-15);
  CHECK(partial_fraction_weights(std::vector<Complex>{1.0, 1.0 + 1e-9}).empty());
}
