#include <doctest.h>

#include <random>

#include "krein/simd.hpp"

using namespace krein;

namespace {

std::vector<double> distances(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-6.0, 2.0);
  std::vector<double> d(n);
  for (auto& x : d) x = std::pow(10.0, u(rng));
  return d;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::set_isa(saved); }
};

}  // namespace

TEST_CASE("scalar green kernel matches the closed form") {
  const auto d = distances(37, 1);
  std::vector<Complex> out(d.size());
  const Complex s(1.3, -0.4);
  simd::scalar::green_batch(s, d, out);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(rel(out[i], std::exp(-s * d[i]) / (four_pi * d[i])) < 1e-15);
}

#ifdef KREIN_HAVE_AVX2
TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!simd::avx2_available()) {
    MESSAGE("AVX2 not available on this CPU, skipping");
    return;
  }
  SUBCASE("green_batch, lengths not a multiple of four") {
    for (std::size_t n : {1u, 3u, 4u, 5u, 63u, 1000u}) {
      const auto d = distances(n, 10 + n);
      for (Complex s : {Complex(1.0, 0.0), Complex(0.7, 3.1), Complex(25.0, -12.0), Complex(1e-3, 1e-3)}) {
        std::vector<Complex> a(n), b(n);
        simd::scalar::green_batch(s, d, a);
        simd::avx2::green_batch(s, d, b);
        for (std::size_t i = 0; i < n; ++i) CHECK(rel(b[i], a[i]) < 1e-14);
      }
    }
  }
  SUBCASE("yukawa_sum") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> sx(3), sy(3), sz(3), c{0.7, -0.2, 1.1};
    for (int i = 0; i < 3; ++i) sx[i] = u(rng), sy[i] = u(rng), sz[i] = u(rng);
    const std::size_t n = 131;
    std::vector<double> tx(n), ty(n), tz(n), a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) tx[i] = 3 * u(rng), ty[i] = 3 * u(rng), tz[i] = 3 * u(rng);
    const simd::PointsSoA src{sx, sy, sz}, tgt{tx, ty, tz};
    simd::scalar::yukawa_sum(1.6, src, c, tgt, a);
    simd::avx2::yukawa_sum(1.6, src, c, tgt, b);
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-14 * scale);
  }
  SUBCASE("cexp_batch over a wide range") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(-700.0, 700.0), im(-1e5, 1e5);
    std::vector<Complex> x(401), a(401), b(401);
    for (auto& v : x) v = Complex(re(rng), im(rng));
    x[0] = Complex(-800.0, 1.0);  // underflows to zero
    simd::scalar::cexp_batch(x, a);
    simd::avx2::cexp_batch(x, b);
    CHECK(b[0] == Complex(0.0, 0.0));
    for (std::size_t i = 1; i < x.size(); ++i) CHECK(rel(b[i], a[i]) < 1e-12);
  }
  SUBCASE("dispatch follows set_isa") {
    IsaGuard guard;
    const auto d = distances(17, 3);
    std::vector<Complex> ref(d.size()), got(d.size());
    simd::scalar::green_batch(Complex(2.0, 1.0), d, ref);
    simd::set_isa(simd::Isa::scalar);
    CHECK(simd::active_isa() == simd::Isa::scalar);
    simd::green_batch(Complex(2.0, 1.0), d, got);
    CHECK(got == ref);
    simd::set_isa(simd::Isa::avx2);
    CHECK(std::string(simd::isa_name(simd::active_isa())) == "avx2");
  }
}
#endif
