#include <algorithm>
#include <cmath>

#include "krein/dalembert.hpp"
#include "krein/quadrature.hpp"

namespace krein::dalembert {

double Gaussian4D::value(const Vec4& q) const {
  Eigen::Vector4d d;
  for (int a = 0; a < 4; ++a) d(a) = q[a] - m(a);
  return norm * std::exp(-0.5 * d.dot(A * d));
}

Gaussian4D Gaussian4D::pulled_back(const Separable& data, const LineConfig& config) {
  const Eigen::Matrix4d L = config.boost_matrix();
  Eigen::Vector4d a0;
  a0 << 1.0 / (data.phi.width * data.phi.width), Eigen::Vector3d::Constant(1.0 / (data.varphi.width * data.varphi.width));
  Gaussian4D g;
  g.A = L.transpose() * a0.asDiagonal() * L;
  g.A = 0.5 * (g.A + g.A.transpose());
  const Vec4 shifted{data.phi.center - config.y[0], data.varphi.center[0] - config.y[1],
                     data.varphi.center[1] - config.y[2], data.varphi.center[2] - config.y[3]};
  const Vec4 m = config.inverse_boost(shifted);
  for (int a = 0; a < 4; ++a) g.m(a) = m[a];
  g.norm = std::pow(pi * data.phi.width * data.phi.width, -0.25) *
           std::pow(pi * data.varphi.width * data.varphi.width, -0.75);
  return g;
}

GaussianResolvent::GaussianResolvent(const Gaussian4D& g, Complex z) : g_(g), z_(z) {
  if (z.imag() == 0.0) throw DomainError("the propagator route needs Im z != 0");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> ea(g.A);
  if (ea.eigenvalues().minCoeff() <= 0.0) throw DomainError("Gaussian quadratic form must be positive definite");
  const Eigen::Matrix4d half = ea.eigenvectors() * ea.eigenvalues().cwiseSqrt().asDiagonal() * ea.eigenvectors().transpose();
  const Eigen::Vector4d dsig(-1.0, 1.0, 1.0, 1.0);
  Eigen::Matrix4d s = half * dsig.asDiagonal() * half;
  s = 0.5 * (s + s.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(s);
  lambda_ = es.eigenvalues();
  w_ = es.eigenvectors().transpose() * half;
}

Complex GaussianResolvent::value(const Vec4& q) const {
  Eigen::Vector4d d;
  for (int a = 0; a < 4; ++a) d(a) = q[a] - g_.m(a);
  const Eigen::Vector4d beta = w_ * d;
  const double sigma = z_.imag() > 0.0 ? 1.0 : -1.0;
  const Complex i(0.0, 1.0);
  auto f = [&](double tau) {
    Complex prod(1.0, 0.0), expo = i * sigma * tau * z_;
    for (int j = 0; j < 4; ++j) {
      const Complex fac = 1.0 - 2.0 * i * sigma * tau * lambda_(j);
      prod *= std::sqrt(fac);
      expo -= 0.5 * beta(j) * beta(j) / fac;
    }
    return std::exp(expo) / prod;
  };
  const double T = 40.0 / std::abs(z_.imag());
  QuadOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-16;
  o.initial_panels = std::clamp(8 + static_cast<int>(std::ceil(T * std::abs(z_.real()) / pi)), 8, 2000);
  o.max_panels = 20000;
  return -i * sigma * g_.norm * integrate(f, 0.0, T, o);
}

}  // namespace krein::dalembert
