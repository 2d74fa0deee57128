#pragma once

#include <cstdint>
#include <vector>

#include "krein/krein_system.hpp"

namespace krein {

// Finite-dimensional stand-in: Hermitian A on C^m, trace tau : C^m -> C^n (n < m),
// and Gamma(z) := gamma_hat(z, z0) with real z0.
class FiniteTestbed {
 public:
  using State = VectorXc;

  // A = U diag(eigenvalues) U^dagger with U unitary.
  FiniteTestbed(MatrixXc unitary, Eigen::VectorXd eigenvalues, MatrixXc tau, double z0);

  Eigen::Index dim_boundary() const { return tau_.rows(); }
  Eigen::Index dim_state() const { return tau_.cols(); }
  double z0() const { return z0_; }
  const MatrixXc& tau() const { return tau_; }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  MatrixXc a_matrix() const;
  // (-A + z)^{-1} as a dense matrix
  MatrixXc resolvent_matrix(Complex z) const;

  bool in_resolvent_set(Complex z) const;
  VectorXc r_apply(Complex z, const VectorXc& phi) const;
  VectorXc gbreve(Complex z, const VectorXc& phi) const;
  VectorXc g_apply(Complex z, const VectorXc& xi) const;
  MatrixXc gamma(Complex z) const;

  double norm(const VectorXc& phi) const { return phi.norm(); }
  Complex inner(const VectorXc& a, const VectorXc& b) const { return a.dot(b); }
  VectorXc combine(Complex a, const VectorXc& x, Complex b, const VectorXc& y) const { return a * x + b * y; }
  std::vector<VectorXc> probe_states(std::size_t count, std::uint64_t seed) const;

 private:
  MatrixXc u_;
  Eigen::VectorXd lambda_;
  MatrixXc tau_;
  double z0_;
};

// Seeded testbed: spectrum in [-1, 1], unit-norm rows of tau, z0 = 2.
FiniteTestbed make_testbed(int m, int n, std::uint64_t seed);

static_assert(KreinSystem<FiniteTestbed>);

}  // namespace krein
