#include "krein/simd.hpp"

namespace krein::simd::scalar {

void green_batch(Complex s, std::span<const double> d, std::span<Complex> out) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double a = std::exp(-s.real() * d[i]) / (four_pi * d[i]);
    const double b = -s.imag() * d[i];
    out[i] = Complex(a * std::cos(b), a * std::sin(b));
  }
}

void yukawa_sum(double s, const PointsSoA& sources, std::span<const double> c, const PointsSoA& targets,
                std::span<double> out) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j) {
      const double dx = targets.x[i] - sources.x[j];
      const double dy = targets.y[i] - sources.y[j];
      const double dz = targets.z[i] - sources.z[j];
      const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
      acc += c[j] * std::exp(-s * r) / (four_pi * r);
    }
    out[i] = acc;
  }
}

void cexp_batch(std::span<const Complex> a, std::span<Complex> out) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double m = std::exp(a[i].real());
    out[i] = Complex(m * std::cos(a[i].imag()), m * std::sin(a[i].imag()));
  }
}

}  // namespace krein::simd::scalar
