#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krein/krein_system.hpp"
#include "krein/radial.hpp"

// d'Alembertian on R^4 = R_t x R^3_x perturbed on a time-like straight line.
// Time dependence is carried by Fourier modes on a periodic sample grid; each
// mode h sees the spatial operator -Lap + (z - h^2).

namespace krein::dalembert {

// sqrt(z - h^2) / (4 pi), principal branch
Complex gamma_symbol(double h, Complex z);

// (z - w)/(2 pi^2) * int_0^inf r^2 / ((r^2 + w - h^2)(r^2 + z - h^2)) dr by quadrature
// on [0, R] plus the asymptotic series of the tail.
Complex symbol_difference_quadrature(double h, Complex z, Complex w);
// |quadrature - (gamma_symbol(h, z) - gamma_symbol(h, w))|
double symbol_difference_check(double h, Complex z, Complex w);

// Lorentz boost along v composed with the translation by y: q -> Lambda q + y.
struct LineConfig {
  Vec4 y{0.0, 0.0, 0.0, 0.0};
  Vec3 v{0.0, 0.0, 0.0};
  double theta = 0.0;

  LineConfig() = default;
  LineConfig(const Vec4& y, const Vec3& v, double theta);

  double gamma_v() const;
  bool at_rest() const { return v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0; }
  Vec4 boost(const Vec4& q) const;          // Lambda q
  Vec4 inverse_boost(const Vec4& q) const;  // Lambda^{-1} q
  Eigen::Matrix4d boost_matrix() const;
};

// n-point periodic grid t_j = center + (j - n/2) spacing with dual frequencies
// h_k = 2 pi k / (n spacing) in FFT order.
class MultiplierGrid {
 public:
  MultiplierGrid(int n, double spacing, double center);
  // 256 points at a quarter of the width, centered on the data
  static MultiplierGrid for_width(double width, double center, int n = 256);

  int size() const { return n_; }
  double spacing() const { return dt_; }
  double center() const { return center_; }
  double period() const { return n_ * dt_; }
  double time(int j) const { return center_ + (j - n_ / 2) * dt_; }
  double frequency(int k) const;
  double nyquist() const { return pi / dt_; }
  std::vector<Complex> symbol_samples(Complex z) const;

  // F_k = sum_j f_j exp(-i h_k (t_j - center)) and its inverse
  std::vector<Complex> forward(const std::vector<Complex>& samples) const;
  std::vector<Complex> inverse(const std::vector<Complex>& coeffs) const;
  // (1/n) sum_k F_k exp(i h_k (t - center))
  Complex interpolate(const std::vector<Complex>& coeffs, double t) const;

 private:
  int n_;
  double dt_;
  double center_;
};

// L2-normalized Gaussians
struct Gaussian1D {
  double center = 0.0;
  double width = 1.0;
  double value(double t) const;
};
struct Gaussian3D {
  Vec3 center{0.0, 0.0, 0.0};
  double width = 1.0;
  double value(const Vec3& x) const;
};
struct Separable {
  Gaussian1D phi;
  Gaussian3D varphi;
  double value(const Vec4& q) const;
};

// Warnings when the grid is shorter than 12 widths or under-resolves the Gaussian.
std::vector<std::string> alias_warnings(const MultiplierGrid& grid, double width);

struct SampledField {
  std::vector<Complex> samples;
  std::vector<std::string> warnings;
};

// [R(z)(phi x varphi)](t_j, 0): FFT of phi, multiply each mode by the spatial
// resolvent of varphi at the origin, inverse FFT.
SampledField gbreve_separable(Complex z, const Gaussian1D& phi, const Gaussian3D& varphi, const MultiplierGrid& grid);

// Free resolvent of a separable Gaussian at arbitrary points, by mode sums on grid.
std::vector<Complex> free_resolvent_separable(Complex z, const Separable& data, const MultiplierGrid& grid,
                                              const std::vector<Vec4>& points);

struct InvertibilityBound {
  double min_modulus = 0.0;   // min_h |theta + symbol(h, z)| over grid frequencies
  double lower_bound = 0.0;   // |Im sqrt(z)| / (4 pi)
  double worst_frequency = 0.0;
  bool holds = false;         // min_modulus >= lower_bound
};
InvertibilityBound invertibility_bound(double theta, Complex z, const MultiplierGrid& grid);

// Resolvent of the perturbed operator for a line at rest (config.v must be zero),
// with the data translated by the line offset. Points must avoid the line.
std::vector<Complex> line_resolvent_separable(Complex z, const LineConfig& config, const Separable& data,
                                              const std::vector<Vec4>& points,
                                              std::optional<MultiplierGrid> grid = std::nullopt);

// Any line: lines at rest use line_resolvent_separable; moving lines use the
// formula for the moving trace evaluated in the lab frame.
std::vector<Complex> line_resolvent(Complex z, const LineConfig& config, const Separable& data,
                                    const std::vector<Vec4>& points);

// Correlated Gaussian C exp(-(q - m)^T A (q - m)/2) on R^4.
struct Gaussian4D {
  double norm = 1.0;
  Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
  Eigen::Vector4d m = Eigen::Vector4d::Zero();
  double value(const Vec4& q) const;
  // q -> data(Lambda q + y)
  static Gaussian4D pulled_back(const Separable& data, const LineConfig& config);
};

// Free resolvent of a correlated Gaussian through the propagator representation
// 1/(lambda + z) = -i int_0^inf exp(i tau (lambda + z)) dtau for Im z > 0 (and the
// mirrored form for Im z < 0); the propagated Gaussian is closed form in tau.
class GaussianResolvent {
 public:
  GaussianResolvent(const Gaussian4D& g, Complex z);
  Complex value(const Vec4& q) const;

 private:
  Gaussian4D g_;
  Complex z_;
  Eigen::Matrix4d w_;  // U^T A^{1/2}
  Eigen::Vector4d lambda_;
};

struct BoostCheck {
  double residual = 0.0;  // max_i |conjugated_i - direct_i| / max_i |direct_i|
  std::vector<Vec4> points;
  std::vector<Complex> conjugated;
  std::vector<Complex> direct;
};

// Compares Pi^* R_Theta^0 Pi applied to the data (data pulled back to the rest
// frame of the line) against the formula for the moving line evaluated directly
// in the lab frame, at `samples` points near the line.
BoostCheck boost_covariance_check(const LineConfig& config, Complex z, const Separable& data, int samples = 16);

// Fields on the periodic time window: sums of atoms
//   (1/n) sum_k coef_k exp(i h_k (t - center)) * chain_k(|x - source center|),
// where chain_k applies (-Lap + p - h_k^2)^{-1} for every base pole p.
struct LineAtom {
  std::vector<Complex> coef;
  radial::Source source;
  std::vector<Complex> poles;
};

class LineState {
 public:
  const std::vector<LineAtom>& atoms() const { return atoms_; }
  void add(const LineAtom& a);
  LineState scaled(Complex c) const;

 private:
  std::vector<LineAtom> atoms_;
};

// The line model at rest through spatial point `position` as a KreinSystem.
// Boundary vectors are unitary Fourier coefficients sqrt(dt/n) F_k of the
// boundary function on the grid, so Gamma(z) is diagonal.
class LineSystem {
 public:
  using State = LineState;

  LineSystem(MultiplierGrid grid, Vec3 position = {0.0, 0.0, 0.0});

  const MultiplierGrid& grid() const { return grid_; }
  Eigen::Index dim_boundary() const { return grid_.size(); }

  LineState separable(const Separable& data) const;
  Complex value(const LineState& s, const Vec4& q) const;

  bool in_resolvent_set(Complex z) const;
  LineState r_apply(Complex z, const LineState& phi) const;
  VectorXc gbreve(Complex z, const LineState& phi) const;
  LineState g_apply(Complex z, const VectorXc& xi) const;
  MatrixXc gamma(Complex z) const;

  double norm(const LineState& phi) const;
  Complex inner(const LineState& a, const LineState& b) const;
  LineState combine(Complex a, const LineState& x, Complex b, const LineState& y) const;
  std::vector<LineState> probe_states(std::size_t count, std::uint64_t seed) const;

 private:
  std::vector<Complex> mode_poles(const std::vector<Complex>& poles, int k) const;

  MultiplierGrid grid_;
  Vec3 position_;
  std::vector<Vec4> cloud_;
};

static_assert(KreinSystem<LineSystem>);

// <Gbreve(conj z) data, xi> on the grid against <data, G(z) xi> in L2(R^4)
double hermitian_pairing_residual(Complex z, const Separable& data, const std::vector<Complex>& xi,
                                  const MultiplierGrid& grid);

// L2 norm of the correction G (theta + Gamma)^{-1} Gbreve applied to the data
double correction_norm(double theta, Complex z, const Separable& data, const MultiplierGrid& grid);
// least-squares slope of log correction_norm against log theta
double dominant_theta_slope(Complex z, const Separable& data, const MultiplierGrid& grid,
                            const std::vector<double>& thetas);

}  // namespace krein::dalembert
