#include "seqbmi/errors.hpp"
#include "seqbmi/sym_linalg.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/LU>

using namespace seqbmi;
using testutil::random_matrix;

namespace {

// Kronecker reference: (I ⊗ A + A ⊗ I) vec(P) = -vec(Q).
Matrix lyapunov_kron(const Matrix& a, const Matrix& q) {
  const Index n = a.rows();
  Matrix big = Matrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      big.block(i * n, j * n, n, n) += (i == j ? 1.0 : 0.0) * a;
      big.block(i * n, j * n, n, n) += a(i, j) * Matrix::Identity(n, n);
    }
  }
  const Vector rhs = -Eigen::Map<const Vector>(q.data(), n * n);
  const Vector sol = big.fullPivLu().solve(rhs);
  return Eigen::Map<const Matrix>(sol.data(), n, n);
}

}  // namespace

TEST_CASE("svec orders the upper triangle row by row") {
  Matrix m(2, 2);
  m << 1, 2, 2, 3;
  CHECK(svec(SymMatrix(m)).data() == Vector((Vector(3) << 1, 2, 3).finished()));
  CHECK(svec(SymMatrix(3)).data() == Vector::Zero(6));
  CHECK(svec(SymMatrix::identity(3)).data() == Vector((Vector(6) << 1, 0, 0, 1, 0, 1).finished()));
}

TEST_CASE("smat inverts svec") {
  Matrix m(2, 2);
  m << 1, 2, 2, 3;
  CHECK(smat(SymVec((Vector(3) << 1, 2, 3).finished())) == SymMatrix(m));
  CHECK(smat(SymVec(Vector::Constant(1, 5.0))).dense()(0, 0) == 5.0);
  CHECK(smat(SymVec((Vector(6) << 1, 0, 0, 1, 0, 1).finished())) == SymMatrix::identity(3));
  CHECK_THROWS_AS(SymVec(Vector::Zero(4)), DimensionError);
  CHECK_THROWS_AS(side_for_svec_length(5), DimensionError);
  CHECK(side_for_svec_length(10) == 4);

  std::mt19937 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + trial % 7;
    const SymMatrix s = testutil::random_sym(rng, n);
    CHECK(smat(svec(s)) == s);
    const SymVec v = svec(s);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) CHECK(v[svec_index(n, i, j)] == s(i, j));
  }
}

TEST_CASE("SymMatrix keeps both triangles equal") {
  SymMatrix s(3);
  s.set(0, 2, 4.0);
  s.add(2, 0, 1.0);
  CHECK(s(0, 2) == 5.0);
  CHECK(s(2, 0) == 5.0);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1e-3;
  CHECK_THROWS_AS(SymMatrix{asym}, ValidationError);
  CHECK_THROWS_AS(SymMatrix{Matrix::Zero(2, 3)}, ValidationError);
  Matrix nan = Matrix::Identity(2, 2);
  nan(1, 1) = std::nan("");
  CHECK_THROWS_AS(SymMatrix{nan}, ValidationError);
}

TEST_CASE("Lyapunov closed forms") {
  const SymMatrix p = solve_lyapunov(Matrix::Constant(1, 1, -1.0), SymMatrix::identity(1));
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  const SymMatrix p2 = solve_lyapunov(-Matrix::Identity(2, 2), SymMatrix::identity(2));
  CHECK((p2.dense() - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("Lyapunov matches the Kronecker reference and meets the residual bound") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 8;
    const Matrix a = testutil::random_stable(rng, n, 0.1 + 0.05 * (trial % 5));
    const Matrix g = random_matrix(rng, n, n);
    const SymMatrix q = SymMatrix::symmetrize(g * g.transpose());
    const SymMatrix p = solve_lyapunov(a, q);
    const double resid = (a * p.dense() + p.dense() * a.transpose() + q.dense()).norm();
    CHECK(resid <= 1e-8 * (1.0 + q.dense().norm() + a.norm() * p.dense().norm()));
    if (n <= 4) {
      const Matrix ref = lyapunov_kron(a, q.dense());
      CHECK((ref - p.dense()).norm() <= 1e-8 * (1.0 + ref.norm()));
    }
  }
}

TEST_CASE("Lyapunov reports a singular operator") {
  Matrix a(2, 2);
  a << 0, 1, -1, 0;
  CHECK_THROWS_AS(solve_lyapunov(a, SymMatrix::identity(2)), SingularPencilError);
  CHECK_THROWS_AS(solve_lyapunov(Matrix::Identity(2, 2), SymMatrix::identity(3)), DimensionError);
}

TEST_CASE("spectral abscissa") {
  CHECK(max_real_eig(-Matrix::Identity(3, 3)) == doctest::Approx(-1.0));
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  CHECK(std::abs(max_real_eig(rot)) < 1e-12);
  // (s+1)(s-2) = s² - s - 2
  Matrix comp(2, 2);
  comp << 0, 1, 2, 1;
  CHECK(max_real_eig(comp) == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 2 + trial % 5;
    const Matrix a = random_matrix(rng, n, n);
    Matrix t = random_matrix(rng, n, n) + 3.0 * Matrix::Identity(n, n);
    if (Eigen::JacobiSVD<Matrix>(t).singularValues().minCoeff() < 0.5) continue;
    CHECK(max_real_eig(t * a * t.inverse()) == doctest::Approx(max_real_eig(a)).epsilon(1e-6));
  }
}

TEST_CASE("symmetric extreme eigenvalues") {
  CHECK(min_eig_sym(SymMatrix::identity(2)) == doctest::Approx(1.0));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = -3;
  d(1, 1) = 5;
  CHECK(min_eig_sym(SymMatrix(d)) == doctest::Approx(-3.0));
  CHECK(max_eig_sym(SymMatrix(d)) == doctest::Approx(5.0));
  // 2×2 restriction via its characteristic polynomial
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix s = testutil::random_sym(rng, 2);
    const double tr = s(0, 0) + s(1, 1);
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1);
    const double lo = 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
    CHECK(min_eig_sym(s) == doctest::Approx(lo).epsilon(1e-10));
  }
}
