#pragma once

#include <functional>
#include <string>
#include <vector>

#include "krein/eigen_tracking.hpp"
#include "krein/spectral.hpp"
#include "krein/types.hpp"

// Laplacian in R^3 perturbed on a unit-speed curve, discretized by Nystrom.

namespace krein::curve {

enum class CurveKind { circle, segment, helix, samples };

class CurveModel {
 public:
  static CurveModel circle(double radius, int n);
  static CurveModel segment(double length, int n);
  // open helix, unit speed, `turns` windings
  static CurveModel helix(double radius, double pitch, double turns, int n);
  // closed curve through points equally spaced in arclength, trigonometric interpolation
  static CurveModel samples(const std::vector<Vec3>& points, int n);

  CurveKind kind() const { return kind_; }
  bool closed() const { return closed_; }
  double length() const { return length_; }
  int size() const { return n_; }
  double spacing() const { return length_ / n_; }
  double node(int i) const { return closed_ ? i * spacing() : (i + 0.5) * spacing(); }
  double curvature_bound() const { return curvature_bound_; }
  // min |gamma(t)-gamma(s)| / dist(t, s) over non-adjacent node pairs
  double separation() const { return separation_; }

  Vec3 point(double t) const;
  // parameter offset u reduced to (-L/2, L/2] on closed curves
  double wrap(double u) const;
  double chord(double t, double u) const;
  // |u| - chord, evaluated without cancellation where the shape allows
  double chord_deficit(double t, double u) const;
  double curvature(double t) const;

 private:
  CurveModel(CurveKind k, bool closed, double length, int n, std::function<Vec3(double)> g);
  void validate();

  CurveKind kind_;
  bool closed_;
  double length_;
  int n_;
  std::function<Vec3(double)> gamma_;
  double radius_ = 0.0;  // circle
  double curvature_bound_ = 0.0;
  double separation_ = 0.0;
};

struct GammaNystrom {
  MatrixXc matrix;
  Complex z;
  double epsilon = 0.0;
  std::vector<double> weights;
  // max |M - M^H| (the weights are uniform, so the weighted adjoint is M^H)
  double hermitian_residual() const;
};

// diagonal scalar of the regularized operator at parameter t
Complex diagonal_scalar(const SpectralPoint& z, const CurveModel& curve, double epsilon, double t);

GammaNystrom build_gamma_tilde(const SpectralPoint& z, const CurveModel& curve, double epsilon);

// max entry of [Gamma(z) - Gamma(w)] - Nystrom((exp(-sqrt(w) d) - exp(-sqrt(z) d)) / (4 pi d))
double gamma_difference_residual(const SpectralPoint& z, const SpectralPoint& w, const CurveModel& curve);

// centered difference of Gamma in z (step 1e-5 |z|) against the kernel exp(-sqrt(z) d)/(8 pi sqrt(z))
double gamma_derivative_residual(const SpectralPoint& z, const CurveModel& curve);

struct CurveRoot {
  double lambda = 0.0;
  VectorXc eigenvector;  // node samples, unit norm
  int multiplicity = 1;
  double residual = 0.0;
};

struct CurveBoundStates {
  std::vector<CurveRoot> roots;
  std::vector<std::string> warnings;
  bool monotone = true;
};

// zeros of the smallest eigenvalue of beta + Gamma(lambda) on [a, b]
CurveBoundStates curve_bound_states(const CurveModel& curve, double beta, double a, double b, int resolution,
                                    double epsilon = -1.0);

struct SpectrumSample {
  double lambda;
  double min_eigenvalue;
};
std::vector<SpectrumSample> curve_spectrum(const CurveModel& curve, double beta, const std::vector<double>& grid,
                                           double epsilon = -1.0);

// max over nodes t_i of the integral of exp(-lambda |gamma(t_i) - gamma(s)|) ds
double condition18_estimate(const CurveModel& curve, double lambda);

// largest squared overlap of v with a pair of discrete Fourier modes +-k
double fourier_mode_overlap(const VectorXc& v);

}  // namespace krein::curve
