#pragma once

#include <span>
#include <vector>

#include "krein/quadrature.hpp"
#include "krein/spectral.hpp"
#include "krein/types.hpp"

// Radially symmetric fields in R^3 of the form
//   (-Lap + p_1)^{-1} ... (-Lap + p_m)^{-1} source,
// where source is an L2-normalized isotropic Gaussian or a delta at a point.

namespace krein::radial {

// exp(-s r) / (4 pi r)
Complex green_value(Complex s, double r);

// L2-normalized isotropic Gaussian (pi sigma^2)^{-3/4} exp(-r^2 / (2 sigma^2)) and its Fourier profile.
double gaussian_value(double sigma, double r);
double gaussian_fourier(double sigma, double k);

QuadOptions default_options();

// [(-Lap + p)^{-1} g](r) for the normalized Gaussian g, by reducing the
// convolution with the Green function to one radial integral.
Complex free_resolvent_gaussian(Complex p, double sigma, double r, const QuadOptions& o = default_options());

enum class SourceKind { gaussian, delta };

struct Source {
  SourceKind kind = SourceKind::delta;
  Vec3 center{0.0, 0.0, 0.0};
  double width = 1.0;  // gaussian only

  static Source gaussian(const Vec3& c, double w) { return {SourceKind::gaussian, c, w}; }
  static Source delta(const Vec3& c) { return {SourceKind::delta, c, 0.0}; }
};

// Value at distance r from the source center. Distinct poles go through partial
// fractions over single-pole values; clustered poles fall back to the Fourier route.
Complex chain_value(const Source& src, std::span<const Complex> poles, double r);

// Same quantity through the radial Fourier integral (independent route).
Complex chain_value_fourier(const Source& src, std::span<const Complex> poles, double r);

// L2 inner product <a, b> (antilinear in a) of two chains whose centers are d apart.
Complex chain_inner(const Source& a, std::span<const Complex> poles_a, const Source& b,
                    std::span<const Complex> poles_b);

// Partial-fraction weights A_i = prod_{j != i} 1/(p_j - p_i); empty when poles cluster.
std::vector<Complex> partial_fraction_weights(std::span<const Complex> poles);

}  // namespace krein::radial
