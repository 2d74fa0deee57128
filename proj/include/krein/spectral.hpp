#pragma once

#include <vector>

#include "krein/errors.hpp"
#include "krein/types.hpp"

namespace krein {

// Principal root with Re > 0. Throws BranchCutError on (-inf, 0].
Complex sqrt_principal(Complex z);

bool on_branch_cut(Complex z);

// exp(w) - 1 without cancellation for small |w|.
Complex expm1c(Complex w);

// Spectral parameter carrying its validated principal root.
class SpectralPoint {
 public:
  SpectralPoint(Complex z);  // NOLINT: implicit on purpose, validation happens here
  SpectralPoint(double z) : SpectralPoint(Complex(z, 0.0)) {}

  Complex value() const { return z_; }
  Complex root() const { return s_; }
  SpectralPoint conj() const { return SpectralPoint(std::conj(z_)); }

 private:
  Complex z_;
  Complex s_;
};

// Hermitian boundary parameter. Hermiticity is checked exactly on the stored entries.
class ThetaMatrix {
 public:
  explicit ThetaMatrix(MatrixXc entries);

  static ThetaMatrix scalar(Eigen::Index n, double alpha);
  static ThetaMatrix diagonal(const std::vector<double>& d);

  const MatrixXc& matrix() const { return m_; }
  Eigen::Index size() const { return m_.rows(); }
  // Smallest eigenvalue (the lower bound of the quadratic form).
  double lower_bound() const;

 private:
  MatrixXc m_;
};

}  // namespace krein
