#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "krein/errors.hpp"
#include "krein/linalg.hpp"
#include "krein/parallel.hpp"
#include "krein/spectral.hpp"
#include "krein/types.hpp"

// Generic Krein-type resolvent R_Theta(z) = R(z) + G(z) (Theta + Gamma(z))^{-1} Gbreve(z)
// over a boundary space C^n, with G(z) = Gbreve(conj z)^dagger.

namespace krein {

template <class S>
concept KreinSystem = requires(const S& s, Complex z, const typename S::State& phi, const VectorXc& xi,
                               std::size_t count, std::uint64_t seed) {
  typename S::State;
  { s.dim_boundary() } -> std::convertible_to<Eigen::Index>;
  { s.r_apply(z, phi) } -> std::convertible_to<typename S::State>;
  { s.gbreve(z, phi) } -> std::convertible_to<VectorXc>;
  { s.g_apply(z, xi) } -> std::convertible_to<typename S::State>;
  { s.gamma(z) } -> std::convertible_to<MatrixXc>;
  { s.in_resolvent_set(z) } -> std::convertible_to<bool>;
  { s.norm(phi) } -> std::convertible_to<double>;
  { s.inner(phi, phi) } -> std::convertible_to<Complex>;
  { s.combine(z, phi, z, phi) } -> std::convertible_to<typename S::State>;
  { s.probe_states(count, seed) } -> std::convertible_to<std::vector<typename S::State>>;
};

inline constexpr std::size_t default_probe_count = 10;

namespace detail {

template <KreinSystem S>
void require_resolvent_set(const S& sys, Complex z) {
  if (!sys.in_resolvent_set(z)) throw ResolventSetError("spectral argument lies in the spectrum of the free operator");
}

inline std::vector<VectorXc> random_boundary_vectors(Eigen::Index n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> nd;
  std::vector<VectorXc> out;
  for (std::size_t k = 0; k < count; ++k) {
    VectorXc v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
    out.push_back(v / v.norm());
  }
  return out;
}

}  // namespace detail

// tau((G(z0) + G(conj z0))/2 - G(z)), assembled from
// tau(G(w) - G(z)) = (z - w) Gbreve(w) G(z) one column at a time.
template <KreinSystem S>
MatrixXc gamma_hat(const S& sys, Complex z, Complex z0) {
  detail::require_resolvent_set(sys, z);
  detail::require_resolvent_set(sys, z0);
  detail::require_resolvent_set(sys, std::conj(z0));
  const Eigen::Index n = sys.dim_boundary();
  MatrixXc out(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto col = sys.g_apply(z, VectorXc::Unit(n, k));
    VectorXc c = (z - z0) * sys.gbreve(z0, col);
    if (z0.imag() == 0.0)
      out.col(k) = c;
    else
      out.col(k) = 0.5 * (c + (z - std::conj(z0)) * sys.gbreve(std::conj(z0), col));
  }
  return out;
}

template <KreinSystem S>
class KreinResolvent {
 public:
  using State = typename S::State;

  KreinResolvent(const S& sys, const ThetaMatrix& theta, Complex z) : sys_(sys), z_(z), solver_(assemble(theta)) {}

  State apply(const State& phi) const {
    const VectorXc xi = solver_.solve(sys_.gbreve(z_, phi));
    return sys_.combine(Complex(1.0), sys_.r_apply(z_, phi), Complex(1.0), sys_.g_apply(z_, xi));
  }
  Complex z() const { return z_; }
  const InvertibilityReport& report() const { return solver_.report(); }

 private:
  MatrixXc assemble(const ThetaMatrix& theta) const {
    if (theta.size() != sys_.dim_boundary()) throw DimensionError("Theta size does not match the boundary space");
    detail::require_resolvent_set(sys_, z_);
    return theta.matrix() + sys_.gamma(z_);
  }

  const S& sys_;
  Complex z_;
  CheckedSolver solver_;
};

template <KreinSystem S>
typename S::State krein_resolvent_apply(const S& sys, const ThetaMatrix& theta, Complex z,
                                        const typename S::State& phi) {
  return KreinResolvent<S>(sys, theta, z).apply(phi);
}

// max over probes of |(z-w) R_T(w) R_T(z) phi - R_T(w) phi + R_T(z) phi| / |phi|
template <KreinSystem S>
double verify_pseudo_resolvent(const S& sys, const ThetaMatrix& theta, Complex z, Complex w,
                               std::size_t probes = default_probe_count, std::uint64_t seed = 0) {
  if (z == w) throw DegenerateInputError("pseudo-resolvent check needs z != w");
  const KreinResolvent<S> rz(sys, theta, z), rw(sys, theta, w);
  const auto phis = sys.probe_states(probes, seed);
  std::vector<double> res(phis.size());
  parallel_for(phis.size(), [&](std::size_t i) {
    const auto& phi = phis[i];
    const auto az = rz.apply(phi);
    const auto d1 = sys.combine(z - w, rw.apply(az), Complex(-1.0), rw.apply(phi));
    const auto d = sys.combine(Complex(1.0), d1, Complex(1.0), az);
    res[i] = sys.norm(d) / sys.norm(phi);
  });
  return *std::max_element(res.begin(), res.end());
}

// max over probe pairs of |<R_T(conj z) phi, psi> - <phi, R_T(z) psi>| / (|phi| |psi|)
template <KreinSystem S>
double verify_adjoint(const S& sys, const ThetaMatrix& theta, Complex z, std::size_t probes = default_probe_count,
                      std::uint64_t seed = 0) {
  const KreinResolvent<S> rz(sys, theta, z), rc(sys, theta, std::conj(z));
  const auto phis = sys.probe_states(probes + 1, seed);
  std::vector<double> res(probes);
  parallel_for(probes, [&](std::size_t i) {
    const auto& phi = phis[i];
    const auto& psi = phis[i + 1];
    const Complex lhs = sys.inner(rc.apply(phi), psi);
    const Complex rhs = sys.inner(phi, rz.apply(psi));
    const double scale = std::sqrt(std::abs(sys.inner(phi, phi)) * std::abs(sys.inner(psi, psi)));
    res[i] = std::abs(lhs - rhs) / scale;
  });
  return *std::max_element(res.begin(), res.end());
}

// max over probes of |(z-w) Gbreve(w) R(z) phi - Gbreve(w) phi + Gbreve(z) phi| / |phi|
template <KreinSystem S>
double verify_gbreve_difference(const S& sys, Complex z, Complex w, std::size_t probes = default_probe_count,
                                std::uint64_t seed = 0) {
  if (z == w) throw DegenerateInputError("difference check needs z != w");
  detail::require_resolvent_set(sys, z);
  detail::require_resolvent_set(sys, w);
  const auto phis = sys.probe_states(probes, seed);
  std::vector<double> res(phis.size());
  parallel_for(phis.size(), [&](std::size_t i) {
    const auto& phi = phis[i];
    const VectorXc d = (z - w) * sys.gbreve(w, sys.r_apply(z, phi)) - sys.gbreve(w, phi) + sys.gbreve(z, phi);
    res[i] = d.norm() / sys.norm(phi);
  });
  return *std::max_element(res.begin(), res.end());
}

// max over random unit xi of |(z-w) R(w) G(z) xi - G(w) xi + G(z) xi| / |G(z) xi|
template <KreinSystem S>
double verify_g_difference(const S& sys, Complex z, Complex w, std::size_t probes = default_probe_count,
                           std::uint64_t seed = 0) {
  if (z == w) throw DegenerateInputError("difference check needs z != w");
  detail::require_resolvent_set(sys, z);
  detail::require_resolvent_set(sys, w);
  const auto xis = detail::random_boundary_vectors(sys.dim_boundary(), probes, seed);
  std::vector<double> res(xis.size());
  parallel_for(xis.size(), [&](std::size_t i) {
    const auto gz = sys.g_apply(z, xis[i]);
    const auto d1 = sys.combine(z - w, sys.r_apply(w, gz), Complex(-1.0), sys.g_apply(w, xis[i]));
    const auto d = sys.combine(Complex(1.0), d1, Complex(1.0), gz);
    res[i] = sys.norm(d) / sys.norm(gz);
  });
  return *std::max_element(res.begin(), res.end());
}

// |Gamma(z)^dagger - Gamma(conj z)|_max
template <KreinSystem S>
double verify_gamma_hermiticity(const S& sys, Complex z) {
  return max_abs(sys.gamma(z).adjoint() - sys.gamma(std::conj(z)));
}

// |Gamma(z) - Gamma(w) - (z-w) M|_max with M_jk = <G(conj w) e_j, G(z) e_k>.
// For w = conj z the hermiticity residual is folded in.
template <KreinSystem S>
double verify_gamma_difference(const S& sys, Complex z, Complex w) {
  if (z == w) throw DegenerateInputError("difference check needs z != w");
  detail::require_resolvent_set(sys, z);
  detail::require_resolvent_set(sys, w);
  const Eigen::Index n = sys.dim_boundary();
  using State = typename S::State;
  std::vector<State> left, right;
  for (Eigen::Index j = 0; j < n; ++j) {
    left.push_back(sys.g_apply(std::conj(w), VectorXc::Unit(n, j)));
    right.push_back(sys.g_apply(z, VectorXc::Unit(n, j)));
  }
  MatrixXc m(n, n);
  parallel_for(static_cast<std::size_t>(n * n), [&](std::size_t idx) {
    const Eigen::Index j = idx / n, k = idx % n;
    m(j, k) = sys.inner(left[j], right[k]);
  });
  const MatrixXc gz = sys.gamma(z), gw = sys.gamma(w);
  double r = max_abs(gz - gw - (z - w) * m);
  if (w == std::conj(z)) r = std::max(r, max_abs(gz.adjoint() - gw));
  return r;
}

struct ScanRecord {
  double lambda = 0.0;
  double gamma_lower_bound = 0.0;      // smallest eigenvalue of the Hermitian part of Gamma(lambda)
  double smallest_abs_eigenvalue = 0.0;  // of Theta + Gamma(lambda)
  double sigma_min = 0.0;
  bool invertible = false;
};

template <KreinSystem S>
std::vector<ScanRecord> invertibility_scan(const S& sys, const ThetaMatrix& theta, const std::vector<double>& grid) {
  if (theta.size() != sys.dim_boundary()) throw DimensionError("Theta size does not match the boundary space");
  std::vector<ScanRecord> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const double lam = grid[i];
    detail::require_resolvent_set(sys, Complex(lam));
    const MatrixXc g = sys.gamma(Complex(lam));
    const MatrixXc gt = theta.matrix() + g;
    ScanRecord r;
    r.lambda = lam;
    r.gamma_lower_bound = hermitian_lower_bound(g);
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (gt + gt.adjoint()), Eigen::EigenvaluesOnly);
    r.smallest_abs_eigenvalue = es.eigenvalues().cwiseAbs().minCoeff();
    const InvertibilityReport rep = invertibility(gt);
    r.sigma_min = rep.sigma_min;
    r.invertible = rep.invertible;
    out[i] = r;
  });
  return out;
}

struct SemiboundCertificate {
  bool certified = false;
  double worst_margin = 0.0;
  double worst_lambda = 0.0;
};

// Sampled check of gamma(Gamma(lambda)) + gamma(Theta) > 0 on a grid inside [lambda0, inf).
// A sampled certificate, not a proof.
template <KreinSystem S>
SemiboundCertificate semibound_certificate(const S& sys, const ThetaMatrix& theta, double lambda0,
                                           const std::vector<double>& grid) {
  if (grid.empty()) throw ContractViolation("semibound certificate needs a nonempty grid");
  for (double l : grid)
    if (l < lambda0) throw ContractViolation("grid points must not lie below lambda0");
  const double gt = theta.lower_bound();
  std::vector<double> margins(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    detail::require_resolvent_set(sys, Complex(grid[i]));
    margins[i] = hermitian_lower_bound(sys.gamma(Complex(grid[i]))) + gt;
  });
  SemiboundCertificate c;
  const auto it = std::min_element(margins.begin(), margins.end());
  c.worst_margin = *it;
  c.worst_lambda = grid[it - margins.begin()];
  c.certified = c.worst_margin > 0.0;
  return c;
}

}  // namespace krein
