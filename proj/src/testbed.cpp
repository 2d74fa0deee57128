#include "krein/testbed.hpp"

#include <random>

namespace krein {

FiniteTestbed::FiniteTestbed(MatrixXc unitary, Eigen::VectorXd eigenvalues, MatrixXc tau, double z0)
    : u_(std::move(unitary)), lambda_(std::move(eigenvalues)), tau_(std::move(tau)), z0_(z0) {
  const Eigen::Index m = u_.rows();
  if (u_.cols() != m || lambda_.size() != m || tau_.cols() != m) throw DimensionError("testbed shapes disagree");
  if (tau_.rows() < 1 || tau_.rows() >= m) throw DimensionError("testbed needs 1 <= n < m");
  if (max_abs(u_.adjoint() * u_ - MatrixXc::Identity(m, m)) > 1e-12) throw ContractViolation("U must be unitary");
  if (!in_resolvent_set(z0_)) throw ResolventSetError("z0 must not be an eigenvalue of A");
  if (!invertibility(tau_ * tau_.adjoint()).invertible) throw ContractViolation("tau must have full row rank");
}

MatrixXc FiniteTestbed::a_matrix() const { return u_ * lambda_.cast<Complex>().asDiagonal() * u_.adjoint(); }

MatrixXc FiniteTestbed::resolvent_matrix(Complex z) const {
  VectorXc d(lambda_.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = 1.0 / (z - lambda_(i));
  return u_ * d.asDiagonal() * u_.adjoint();
}

bool FiniteTestbed::in_resolvent_set(Complex z) const {
  for (Eigen::Index i = 0; i < lambda_.size(); ++i)
    if (std::abs(z - lambda_(i)) <= 1e-12) return false;
  return true;
}

VectorXc FiniteTestbed::r_apply(Complex z, const VectorXc& phi) const {
  if (!in_resolvent_set(z)) throw ResolventSetError("z is an eigenvalue of A");
  VectorXc c = u_.adjoint() * phi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) /= (z - lambda_(i));
  return u_ * c;
}

VectorXc FiniteTestbed::gbreve(Complex z, const VectorXc& phi) const { return tau_ * r_apply(z, phi); }

// (tau R(conj z))^dagger = R(z) tau^dagger since A is Hermitian
VectorXc FiniteTestbed::g_apply(Complex z, const VectorXc& xi) const { return r_apply(z, tau_.adjoint() * xi); }

MatrixXc FiniteTestbed::gamma(Complex z) const { return gamma_hat(*this, z, Complex(z0_)); }

std::vector<VectorXc> FiniteTestbed::probe_states(std::size_t count, std::uint64_t seed) const {
  return detail::random_boundary_vectors(dim_state(), count, seed);
}

FiniteTestbed make_testbed(int m, int n, std::uint64_t seed) {
  if (n < 1 || m > 200 || n >= m) throw DimensionError("make_testbed needs 1 <= n < m <= 200");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-1.0, 1.0);

  MatrixXc g(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) g(i, j) = Complex(nd(rng), nd(rng));
  Eigen::HouseholderQR<MatrixXc> qr(g);
  MatrixXc u = qr.householderQ();

  Eigen::VectorXd lam(m);
  for (int i = 0; i < m; ++i) lam(i) = ud(rng);

  MatrixXc tau(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) tau(i, j) = Complex(nd(rng), nd(rng));
    tau.row(i) /= tau.row(i).norm();
  }
  return FiniteTestbed(std::move(u), std::move(lam), std::move(tau), 2.0);
}

}  // namespace krein
