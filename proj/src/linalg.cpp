#include "krein/linalg.hpp"

#include <sstream>

namespace krein {

double hermitian_lower_bound(const MatrixXc& m) {
  const MatrixXc h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

InvertibilityReport invertibility(const MatrixXc& m) {
  Eigen::JacobiSVD<MatrixXc> svd(m);
  const auto& s = svd.singularValues();
  InvertibilityReport r;
  r.sigma_max = s(0);
  r.sigma_min = s(s.size() - 1);
  r.invertible = r.sigma_max > 0.0 && r.sigma_min > singular_threshold * r.sigma_max;
  return r;
}

CheckedSolver::CheckedSolver(const MatrixXc& m) : report_(invertibility(m)) {
  if (!report_.invertible) {
    std::ostringstream os;
    os << "Theta + Gamma(z) is singular: smallest singular value " << report_.sigma_min << " vs norm "
       << report_.sigma_max;
    throw GammaSingularError(os.str(), report_.sigma_min);
  }
  lu_.compute(m);
}

double max_abs(const MatrixXc& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace krein
