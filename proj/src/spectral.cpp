#include "krein/spectral.hpp"

#include "krein/linalg.hpp"

namespace krein {

bool on_branch_cut(Complex z) { return z.imag() == 0.0 && z.real() <= 0.0; }

Complex sqrt_principal(Complex z) {
  if (on_branch_cut(z)) throw BranchCutError("spectral point on the cut (-inf, 0]");
  // std::sqrt picks Re >= 0, and Re = 0 only happens on the cut
  return std::sqrt(z);
}

Complex expm1c(Complex w) {
  const double x = w.real(), y = w.imag();
  if (std::abs(x) > 0.5 || std::abs(y) > 0.5) return std::exp(w) - 1.0;
  const double sh = std::sin(0.5 * y);
  const double re = std::expm1(x) * std::cos(y) - 2.0 * sh * sh;
  const double im = std::exp(x) * std::sin(y);
  return {re, im};
}

SpectralPoint::SpectralPoint(Complex z) : z_(z), s_(sqrt_principal(z)) {}

ThetaMatrix::ThetaMatrix(MatrixXc entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw ContractViolation("Theta must be a nonempty square matrix");
  for (Eigen::Index j = 0; j < m_.rows(); ++j)
    for (Eigen::Index k = j; k < m_.cols(); ++k)
      if (m_(j, k) != std::conj(m_(k, j))) throw ContractViolation("Theta must be Hermitian");
}

ThetaMatrix ThetaMatrix::scalar(Eigen::Index n, double alpha) {
  return ThetaMatrix(MatrixXc::Identity(n, n) * alpha);
}

ThetaMatrix ThetaMatrix::diagonal(const std::vector<double>& d) {
  MatrixXc m = MatrixXc::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return ThetaMatrix(std::move(m));
}

double ThetaMatrix::lower_bound() const { return hermitian_lower_bound(m_); }

}  // namespace krein
