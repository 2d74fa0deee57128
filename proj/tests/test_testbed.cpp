#include <doctest.h>

#include <set>

#include "krein/testbed.hpp"
#include "suites.hpp"

using namespace krein;

namespace {

// R_Theta(z) = R + R tau^H (Theta + Gamma)^{-1} tau R as dense matrices
MatrixXc dense_krein(const FiniteTestbed& b, const ThetaMatrix& t, Complex z) {
  const MatrixXc r = b.resolvent_matrix(z);
  const MatrixXc g = b.gamma(z);
  return r + r * b.tau().adjoint() * (t.matrix() + g).inverse() * b.tau() * r;
}

}  // namespace

TEST_CASE("testbed construction") {
  const FiniteTestbed b = make_testbed(5, 1, 0);
  CHECK(b.dim_state() == 5);
  CHECK(b.dim_boundary() == 1);
  CHECK(b.z0() == 2.0);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(b.eigenvalues()(i) >= -1.0);
    CHECK(b.eigenvalues()(i) <= 1.0);
  }
  const MatrixXc a = b.a_matrix();
  CHECK(max_abs(a - a.adjoint()) < 1e-14);
  CHECK_THROWS_AS(make_testbed(2, 2, 0), DimensionError);
  CHECK_THROWS_AS(make_testbed(3, 0, 0), DimensionError);
}

TEST_CASE("testbed is deterministic in the seed") {
  const FiniteTestbed a = make_testbed(12, 3, 42), b = make_testbed(12, 3, 42), c = make_testbed(12, 3, 43);
  CHECK((a.a_matrix().array() == b.a_matrix().array()).all());
  CHECK((a.tau().array() == b.tau().array()).all());
  CHECK(max_abs(a.tau() - c.tau()) > 0.1);
}

TEST_CASE("resolvent convention R(z) = (z - A)^{-1}") {
  const FiniteTestbed b = make_testbed(8, 2, 3);
  const Complex z(0.4, 0.9);
  const MatrixXc lhs = (z * MatrixXc::Identity(8, 8) - b.a_matrix()) * b.resolvent_matrix(z);
  CHECK(max_abs(lhs - MatrixXc::Identity(8, 8)) < 1e-13);
  CHECK_THROWS_AS(b.r_apply(b.eigenvalues()(0), VectorXc::Ones(8)), ResolventSetError);
}

TEST_CASE("gamma_hat") {
  const FiniteTestbed b = make_testbed(20, 2, 1);
  CHECK(max_abs(gamma_hat(b, b.z0(), b.z0())) == 0.0);
  const Complex z(1.0, 1.0), w(2.0, -3.0);
  CHECK(verify_gamma_difference(b, z, w) < 1e-12);
  CHECK(max_abs(b.gamma(z).adjoint() - b.gamma(std::conj(z))) < 1e-12);
  CHECK_THROWS_AS(gamma_hat(b, b.eigenvalues()(3), b.z0()), ResolventSetError);
}

TEST_CASE("all four identities at m=50, n=3, seed=7") {
  const FiniteTestbed b = make_testbed(50, 3, 7);
  const Complex z(0.3, 0.8), w(-0.5, -1.2);
  CHECK(verify_gbreve_difference(b, z, w) < 1e-12);
  CHECK(verify_g_difference(b, z, w) < 1e-12);
  CHECK(verify_gamma_difference(b, z, w) < 1e-12);
  CHECK(verify_gamma_hermiticity(b, z) < 1e-12);
}

TEST_CASE("Krein resolvent against the dense formula and its identities") {
  const FiniteTestbed b = make_testbed(30, 2, 3);
  const ThetaMatrix id = ThetaMatrix::scalar(2, 1.0);
  const Complex z(0.0, 1.0);
  const VectorXc phi = b.probe_states(1, 9)[0];
  CHECK((krein_resolvent_apply(b, id, z, phi) - dense_krein(b, id, z) * phi).norm() < 1e-12);
  CHECK(verify_pseudo_resolvent(b, id, z, Complex(0.0, 2.0)) < 1e-12);
  CHECK(verify_adjoint(b, id, z) < 1e-12);
  CHECK_THROWS_AS(verify_pseudo_resolvent(b, id, z, z), DegenerateInputError);
  CHECK_THROWS_AS(verify_gbreve_difference(b, z, z), DegenerateInputError);
  CHECK_THROWS_AS(verify_gamma_difference(b, z, z), DegenerateInputError);
  CHECK_THROWS_AS(krein_resolvent_apply(b, ThetaMatrix::scalar(3, 1.0), z, phi), DimensionError);
}

TEST_CASE("adjoint symmetry with an indefinite Theta") {
  const FiniteTestbed b = make_testbed(30, 3, 5);
  const ThetaMatrix t = ThetaMatrix::diagonal({1.0, -1.0, 0.0});
  CHECK(verify_adjoint(b, t, Complex(1.0, 2.0)) < 1e-12);
  // real point off the spectrum
  CHECK(verify_adjoint(b, t, Complex(3.5, 0.0)) < 1e-12);
}

TEST_CASE("dominant Theta leaves the free resolvent") {
  const FiniteTestbed b = make_testbed(16, 2, 11);
  const Complex z(0.2, 0.7);
  const VectorXc phi = b.probe_states(1, 4)[0];
  const VectorXc out = krein_resolvent_apply(b, ThetaMatrix::scalar(2, 1e8), z, phi);
  const VectorXc free = b.r_apply(z, phi);
  const double gnorm = b.resolvent_matrix(z).norm() * b.tau().norm();
  const double bound = gnorm * b.gbreve(z, phi).norm() / (1e8 - b.gamma(z).norm());
  CHECK((out - free).norm() <= bound * (1.0 + 1e-9));
  CHECK((out - free).norm() > 0.0);
}

TEST_CASE("states with vanishing boundary values are not corrected") {
  const FiniteTestbed b = make_testbed(10, 2, 2);
  const Complex z(0.1, 0.5);
  // phi = (z - A) psi with tau psi = 0 gives Gbreve(z) phi = 0
  const Eigen::FullPivLU<MatrixXc> lu(b.tau());
  const MatrixXc ker = lu.kernel();
  const VectorXc psi = ker.col(0);
  const VectorXc phi = (z * MatrixXc::Identity(10, 10) - b.a_matrix()) * psi;
  REQUIRE(b.gbreve(z, phi).norm() < 1e-13);
  const VectorXc out = krein_resolvent_apply(b, ThetaMatrix::scalar(2, 0.3), z, phi);
  CHECK((out - b.r_apply(z, phi)).norm() < 1e-13);
}

TEST_CASE("scan flag and solver agree at a constructed singular point") {
  const FiniteTestbed b = make_testbed(12, 3, 8);
  const double l0 = 1.7;
  const MatrixXc g = b.gamma(l0);
  MatrixXc t = -0.5 * (g + g.adjoint());
  t(1, 1) += 1.0;
  t(2, 2) += 1.0;
  const ThetaMatrix theta(MatrixXc(0.5 * (t + t.adjoint())));
  const auto scan = invertibility_scan(b, theta, {1.2, l0, 3.0});
  CHECK(scan[0].invertible);
  CHECK_FALSE(scan[1].invertible);
  CHECK(scan[2].invertible);
  CHECK_THROWS_AS(krein_resolvent_apply(b, theta, l0, b.probe_states(1, 0)[0]), GammaSingularError);
  CHECK_NOTHROW(krein_resolvent_apply(b, theta, 1.2, b.probe_states(1, 0)[0]));
}

TEST_CASE("twenty seeded testbeds within 1e-12") {
  std::set<std::pair<int, int>> shapes;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = cli::testbed_shape(seed);
    CHECK(s.m <= 50);
    CHECK(s.n <= 5);
    CHECK(s.n < s.m);
    shapes.insert({s.m, s.n});
  }
  CHECK(shapes.size() > 10);
  cli::SuiteOptions o;
  for (const auto& c : cli::testbed_suite(o)) {
    INFO(c.name);
    CHECK(c.residual < 1e-12);
  }
}
