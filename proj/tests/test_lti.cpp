#include "seqbmi/errors.hpp"
#include "seqbmi/lti.hpp"
#include "freq_oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

using namespace seqbmi;

namespace {

Matrix mat1(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("closed loop") {
  const Plant p = testutil::scalar_plant();
  const ClosedLoop open = closed_loop(p, Matrix::Zero(1, 1));
  CHECK(open.A == p.A);
  CHECK(open.B == p.B1);
  CHECK(open.C == p.C1);
  CHECK(open.D == p.D11);

  const ClosedLoop cl = closed_loop(p, mat1(-1.0));
  CHECK(cl.A(0, 0) == -2.0);
  CHECK(cl.B(0, 0) == 1.0);
  CHECK(cl.C(0, 0) == 1.0);
  CHECK(cl.D(0, 0) == 0.0);

  std::mt19937 rng(1);
  for (int s = 0; s < 10; ++s) {
    Plant q = testutil::random_plant(rng, 3, 2, 2, 2, 2);
    q.D11 = testutil::random_matrix(rng, 2, 2);
    q.D21 = testutil::random_matrix(rng, 2, 2);
    const Matrix k = testutil::random_matrix(rng, 2, 2);
    const ClosedLoop c = closed_loop(q, k);
    Matrix a = q.A, b = q.B1, cc = q.C1, d = q.D11;
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j)
        for (Index u = 0; u < 2; ++u)
          for (Index y = 0; y < 2; ++y) a(i, j) += q.B(i, u) * k(u, y) * q.C(y, j);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 2; ++j)
        for (Index u = 0; u < 2; ++u)
          for (Index y = 0; y < 2; ++y) b(i, j) += q.B(i, u) * k(u, y) * q.D21(y, j);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 3; ++j)
        for (Index u = 0; u < 2; ++u)
          for (Index y = 0; y < 2; ++y) cc(i, j) += q.D12(i, u) * k(u, y) * q.C(y, j);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j)
        for (Index u = 0; u < 2; ++u)
          for (Index y = 0; y < 2; ++y) d(i, j) += q.D12(i, u) * k(u, y) * q.D21(y, j);
    CHECK((c.A - a).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((c.B - b).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((c.C - cc).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((c.D - d).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK_THROWS_AS(closed_loop(p, Matrix::Zero(2, 1)), DimensionError);
}

TEST_CASE("plant dimension checks name the offending matrix") {
  Plant p = testutil::scalar_plant();
  CHECK_NOTHROW(p.check());
  p.C1 = Matrix::Zero(1, 2);
  try {
    p.check();
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("C1") != std::string::npos);
  }
  p = testutil::scalar_plant();
  p.A(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(p.check(), ValidationError);
}

TEST_CASE("h2 norm in the trace convention") {
  CHECK(h2_norm(mat1(-1.0), mat1(1.0), mat1(1.0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h2_norm(mat1(-2.0), mat1(1.0), mat1(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(h2_norm(mat1(0.5), mat1(1.0), mat1(1.0)), UnstableSystemError);

  std::mt19937 rng(2);
  for (int s = 0; s < 5; ++s) {
    const Matrix a = testutil::random_stable(rng, 4);
    const Matrix b = testutil::random_matrix(rng, 4, 2);
    const Matrix c = testutil::random_matrix(rng, 3, 4);
    const double v = h2_norm(a, b, c);
    const double q = testutil::h2_quadrature(a, b, c);
    CHECK(std::abs(v - q) <= 0.01 * q);
  }
}

TEST_CASE("hinf norm") {
  CHECK(hinf_norm(mat1(-1.0), mat1(1.0), mat1(1.0), mat1(0.0)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(hinf_norm(mat1(-2.0), mat1(2.0), mat1(1.0), mat1(0.0)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(hinf_norm(mat1(1.0), mat1(1.0), mat1(1.0), mat1(0.0)), UnstableSystemError);

  // lightly damped resonance: peak 1/(2ζ√(1-ζ²)) away from ω = 0
  const double zeta = 0.05;
  Matrix a(2, 2);
  a << 0.0, 1.0, -1.0, -2.0 * zeta;
  Matrix b(2, 1), c(1, 2);
  b << 0.0, 1.0;
  c << 1.0, 0.0;
  CHECK(hinf_norm(a, b, c, mat1(0.0)) == doctest::Approx(1.0 / (2.0 * zeta * std::sqrt(1.0 - zeta * zeta))).epsilon(1e-6));

  std::mt19937 rng(3);
  for (int s = 0; s < 8; ++s) {
    const Matrix a3 = testutil::random_stable(rng, 3, 0.1 + 0.2 * s);
    const Matrix b3 = testutil::random_matrix(rng, 3, 2);
    const Matrix c3 = testutil::random_matrix(rng, 2, 3);
    const Matrix d3 = s % 2 ? testutil::random_matrix(rng, 2, 2, 0.3) : Matrix::Zero(2, 2);
    const double v = hinf_norm(a3, b3, c3, d3);
    const double o = testutil::hinf_sweep(a3, b3, c3, d3);
    CHECK(std::abs(v - o) <= 1e-3 * o);
    CHECK(v >= o * (1.0 - 1e-6));
  }
}

TEST_CASE("closed loop norm is infinite for unstable loops") {
  const Plant p = testutil::scalar_plant();
  CHECK(std::isinf(closed_loop_norm(closed_loop(p, mat1(2.0)), NormKind::H2)));
  CHECK(std::isinf(closed_loop_norm(closed_loop(p, mat1(2.0)), NormKind::Hinf)));
  CHECK(closed_loop_norm(closed_loop(p, mat1(-1.0)), NormKind::H2) == doctest::Approx(0.25));
  CHECK(closed_loop_norm(closed_loop(p, mat1(-1.0)), NormKind::Hinf) == doctest::Approx(0.5));
}

TEST_CASE("open loop norm") {
  Plant p = testutil::scalar_plant();
  CHECK(open_loop_norm(p, NormKind::H2) == doctest::Approx(0.5));
  CHECK(open_loop_norm(p, NormKind::Hinf) == doctest::Approx(1.0));
  p.A(0, 0) = 0.3;
  CHECK(std::isinf(open_loop_norm(p, NormKind::H2)));
  CHECK(std::isinf(open_loop_norm(p, NormKind::Hinf)));

  std::mt19937 rng(4);
  const Plant q = testutil::random_plant(rng, 3, 2, 1, 2, 1);
  CHECK(open_loop_norm(q, NormKind::H2) == doctest::Approx(h2_norm(q.A, q.B1, q.C1)));
  CHECK(open_loop_norm(q, NormKind::Hinf) == doctest::Approx(hinf_norm(q.A, q.B1, q.C1, q.D11)));
}

TEST_CASE("stability certificate uses the 1e-5 threshold") {
  CHECK(certify_stability(-Matrix::Identity(3, 3)));
  CHECK_FALSE(certify_stability(mat1(0.1)));
  CHECK(certify_stability(mat1(1e-6)));
  CHECK_FALSE(certify_stability(mat1(1e-5)));
}

TEST_CASE("B1 regularization") {
  CHECK(regularize_b1(Matrix::Identity(2, 2)).dense() == Matrix::Identity(2, 2));
  CHECK((regularize_b1(Matrix::Zero(2, 2)).dense() - 1e-5 * Matrix::Identity(2, 2)).norm() == 0.0);
  std::mt19937 rng(5);
  const Vector v = testutil::random_vector(rng, 3);
  const Matrix b1 = v * Vector::Ones(2).transpose();  // rank one
  const SymMatrix r = regularize_b1(b1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(r.dense());
  CHECK(es.eigenvalues().minCoeff() >= 1e-5 - 1e-12);
  CHECK((r.dense() - b1 * b1.transpose() - 1e-5 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("norm kinds parse") {
  CHECK(parse_norm_kind("h2") == NormKind::H2);
  CHECK(parse_norm_kind("hinf") == NormKind::Hinf);
  CHECK(std::string(to_string(NormKind::Hinf)) == "hinf");
  CHECK_THROWS_AS(parse_norm_kind("h3"), ValidationError);
}
