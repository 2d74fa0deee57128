#pragma once

#include <string>
#include <vector>

#include "krein/eigen_tracking.hpp"
#include "krein/krein_system.hpp"
#include "krein/radial.hpp"

// Laplacian in R^3 with finitely many point interactions.

namespace krein::points {

class PointConfig {
 public:
  PointConfig(std::vector<Vec3> centers, ThetaMatrix theta);

  Eigen::Index size() const { return static_cast<Eigen::Index>(centers_.size()); }
  const std::vector<Vec3>& centers() const { return centers_; }
  const ThetaMatrix& theta() const { return theta_; }
  double d_min() const { return d_min_; }

  // centers scaled by s and Theta divided by s
  PointConfig scaled(double s) const;

 private:
  std::vector<Vec3> centers_;
  ThetaMatrix theta_;
  double d_min_;
};

Complex green_kernel(const SpectralPoint& z, const Vec3& x);

// sqrt(z)/(4 pi) on the diagonal, -G_z(y_j - y_k) off it (no Theta)
MatrixXc gamma_free(const SpectralPoint& z, const std::vector<Vec3>& centers);
// Theta + gamma_free
MatrixXc gamma_matrix(const SpectralPoint& z, const PointConfig& config);
// d/dz of gamma_free: 1/(8 pi sqrt z) and exp(-sqrt(z) d)/(8 pi sqrt z)
MatrixXc gamma_derivative(const SpectralPoint& z, const std::vector<Vec3>& centers);
// centered difference with step 1e-5 |z| against gamma_derivative, max entry
double gamma_derivative_check(const SpectralPoint& z, const PointConfig& config);

struct BoundState {
  double z_star = 0.0;
  VectorXc coefficients;  // unit norm, largest entry real positive
  MatrixXc kernel;        // all kernel vectors when multiplicity > 1
  int multiplicity = 1;
  double residual = 0.0;  // |Gamma_Theta(z_star) c|
  double energy() const { return -z_star; }
};

struct BoundStateSearch {
  std::vector<BoundState> states;
  std::vector<std::string> warnings;
  bool monotone = true;
};

BoundStateSearch bound_states(const PointConfig& config, double a, double b, int resolution);

// sum_j c_j G_{z*}(x - y_j)
Complex eigenfunction_eval(const BoundState& state, const PointConfig& config, const Vec3& x);

struct FdResidual {
  double relative = 0.0;
  std::size_t points = 0;
  double spacing = 0.0;
  double exclusion = 0.0;  // radius of the balls skipped around centers
};

// |(-Lap + z*) psi| / |psi| on a uniform grid over the centers' bounding box plus
// margin, using the sixth-order central Laplacian and skipping balls around centers.
FdResidual eigenfunction_fd_residual(const BoundState& state, const PointConfig& config, double spacing = 0.01,
                                     double exclusion = 0.1, double margin = 1.5);

Complex resolvent_kernel(const SpectralPoint& z, const PointConfig& config, const Vec3& x, const Vec3& xp);

// (-Lap + z)^{-1} applied to the normalized Gaussian centered at mu, evaluated at x
Complex free_resolvent_gaussian(const SpectralPoint& z, const Vec3& mu, double sigma, const Vec3& x);
VectorXc gbreve_gaussian(const SpectralPoint& z, const PointConfig& config, const Vec3& mu, double sigma);

struct Atom {
  Complex coef;
  radial::Source source;
  std::vector<Complex> poles;
};

// Finite sum of resolvent chains on Gaussians and deltas.
class FieldState {
 public:
  FieldState() = default;
  static FieldState gaussian(const Vec3& mu, double sigma, Complex coef = 1.0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  void add(const Atom& a);
  FieldState scaled(Complex c) const;
  FieldState with_pole(Complex z) const;
  Complex value(const Vec3& x) const;

 private:
  std::vector<Atom> atoms_;
};

// The point model as a KreinSystem. Norms are RMS values over a fixed point
// cloud around the centers; inner products are exact L2 pairings.
class PointSystem {
 public:
  using State = FieldState;

  explicit PointSystem(std::vector<Vec3> centers);

  Eigen::Index dim_boundary() const { return static_cast<Eigen::Index>(centers_.size()); }
  const std::vector<Vec3>& centers() const { return centers_; }
  const std::vector<Vec3>& cloud() const { return cloud_; }

  bool in_resolvent_set(Complex z) const { return !on_branch_cut(z); }
  FieldState r_apply(Complex z, const FieldState& phi) const;
  VectorXc gbreve(Complex z, const FieldState& phi) const;
  FieldState g_apply(Complex z, const VectorXc& xi) const;
  MatrixXc gamma(Complex z) const;

  double norm(const FieldState& phi) const;
  Complex inner(const FieldState& a, const FieldState& b) const;
  FieldState combine(Complex a, const FieldState& x, Complex b, const FieldState& y) const;
  std::vector<FieldState> probe_states(std::size_t count, std::uint64_t seed) const;

 private:
  std::vector<Vec3> centers_;
  std::vector<Vec3> cloud_;
};

static_assert(KreinSystem<PointSystem>);

}  // namespace krein::points
