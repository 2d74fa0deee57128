#pragma once

#include <functional>
#include <string>
#include <vector>

#include "krein/types.hpp"

namespace krein {

// Log-spaced grid, endpoints included.
std::vector<double> log_grid(double a, double b, int n);

using HermitianFamily = std::function<MatrixXc(double)>;

struct TrackOptions {
  double cluster_tol = 1e-9;  // relative, for merging roots of different curves
  double root_tol = 1e-12;    // |mu| target, relative to the matrix scale
  int refine_factor = 8;      // points inserted into an interval that breaks monotonicity
  int max_curves = -1;        // track only the lowest curves when >= 0
};

struct TrackedRoot {
  double lambda = 0.0;
  MatrixXc kernel;  // orthonormal columns spanning the numerical kernel
  int multiplicity = 0;
  double residual = 0.0;  // max |mu| of the clustered curves at lambda
};

struct TrackSample {
  double lambda;
  Eigen::VectorXd eigenvalues;
};

struct TrackResult {
  std::vector<TrackedRoot> roots;
  std::vector<std::string> warnings;
  std::vector<TrackSample> samples;
  bool monotone = true;
};

// Follows the sorted eigenvalue curves of a Hermitian family over a log grid on
// [a, b], brackets sign changes and refines each by bisection.
TrackResult track_roots(const HermitianFamily& family, double a, double b, int resolution,
                        const TrackOptions& options = {});

}  // namespace krein
