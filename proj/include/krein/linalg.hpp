#pragma once

#include "krein/errors.hpp"
#include "krein/types.hpp"

namespace krein {

// sigma_min <= singular_threshold * sigma_max counts as singular, everywhere.
inline constexpr double singular_threshold = 1e-10;

double hermitian_lower_bound(const MatrixXc& m);

struct InvertibilityReport {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool invertible = false;
};

InvertibilityReport invertibility(const MatrixXc& m);

// LU solve guarded by the same singular-value test as invertibility().
class CheckedSolver {
 public:
  explicit CheckedSolver(const MatrixXc& m);
  VectorXc solve(const VectorXc& rhs) const { return lu_.solve(rhs); }
  MatrixXc solve(const MatrixXc& rhs) const { return lu_.solve(rhs); }
  const InvertibilityReport& report() const { return report_; }

 private:
  InvertibilityReport report_;
  Eigen::PartialPivLU<MatrixXc> lu_;
};

double max_abs(const MatrixXc& m);

}  // namespace krein
