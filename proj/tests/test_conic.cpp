#include "seqbmi/conic.hpp"
#include "seqbmi/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

using namespace seqbmi;

namespace {

ConicProgram lp_example() {
  ConicProgram p;
  p.nvars = 1;
  p.objective = Vector::Ones(1);
  BlockBuilder b(ConeType::Nonneg, 1, 1);
  b.add(0, 0, 1.0);
  b.add_offset(0, -1.0);
  p.blocks.push_back(b.finish());
  return p;
}

ConicProgram sdp_example() {
  ConicProgram p;
  p.nvars = 1;
  p.objective = Vector::Ones(1);
  BlockBuilder b(ConeType::Psd, 2, 1);
  b.add(b.psd_row(0, 0), 0, 1.0);
  b.add_offset(b.psd_row(0, 1), 2.0);
  b.add_offset(b.psd_row(1, 1), 1.0);
  p.blocks.push_back(b.finish());
  return p;
}

// minimize c1 z1 + c2 z2 + c3 z3  s.t.  |z1|, |z2| <= 1,  z3 >= ‖(z1 - a, z2 - b)‖.
struct SocInstance {
  double c1, c2, c3, a, b;
};

ConicProgram soc_program(const SocInstance& s) {
  ConicProgram p;
  p.nvars = 3;
  p.objective = Vector(3);
  p.objective << s.c1, s.c2, s.c3;
  BlockBuilder box(ConeType::Nonneg, 4, 3);
  for (int i = 0; i < 2; ++i) {
    box.add(2 * i, i, -1.0);
    box.add_offset(2 * i, 1.0);
    box.add(2 * i + 1, i, 1.0);
    box.add_offset(2 * i + 1, 1.0);
  }
  p.blocks.push_back(box.finish());
  BlockBuilder q(ConeType::Soc, 3, 3);
  q.add(0, 2, 1.0);
  q.add(1, 0, 1.0);
  q.add_offset(1, -s.a);
  q.add(2, 1, 1.0);
  q.add_offset(2, -s.b);
  p.blocks.push_back(q.finish());
  return p;
}

double ternary_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return f(0.5 * (lo + hi));
}

// Nested ternary search over the box of the convex reduced objective.
double soc_oracle(const SocInstance& s) {
  auto inner = [&](double z1) {
    return ternary_min([&](double z2) { return s.c1 * z1 + s.c2 * z2 + s.c3 * std::hypot(z1 - s.a, z2 - s.b); }, -1.0, 1.0);
  };
  return ternary_min(inner, -1.0, 1.0);
}

SocInstance random_soc(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> pos(0.2, 2.0);
  return {u(rng), u(rng), pos(rng), u(rng), u(rng)};
}

// Random bounded LMI program: box on z plus F0 + Σ z_i F_i ⪰ 0 with F0 ≻ 0.
ConicProgram random_lmi(std::mt19937& rng, Index n, Index side) {
  ConicProgram p;
  p.nvars = n;
  p.objective = testutil::random_vector(rng, n);
  BlockBuilder box(ConeType::Nonneg, 2 * n, n);
  for (Index i = 0; i < n; ++i) {
    box.add(2 * i, i, -1.0);
    box.add_offset(2 * i, 2.0);
    box.add(2 * i + 1, i, 1.0);
    box.add_offset(2 * i + 1, 2.0);
  }
  p.blocks.push_back(box.finish());
  BlockBuilder lmi(ConeType::Psd, side, n);
  for (Index i = 0; i < side; ++i) lmi.add_offset(lmi.psd_row(i, i), 1.0);
  for (Index k = 0; k < n; ++k) {
    const Matrix f = testutil::random_matrix(rng, side, side, 0.5);
    const Matrix s = f + f.transpose();
    for (Index i = 0; i < side; ++i)
      for (Index j = i; j < side; ++j) lmi.add(lmi.psd_row(i, j), k, s(i, j));
  }
  p.blocks.push_back(lmi.finish());
  return p;
}

// Independent membership test of one block image.
bool image_in_cone(const ConeBlock& b, const Vector& z, double tol) {
  const Vector v = b.image(z);
  switch (b.cone) {
    case ConeType::Zero: return v.cwiseAbs().maxCoeff() <= tol;
    case ConeType::Nonneg: return v.minCoeff() >= -tol;
    case ConeType::Soc: return v[0] + tol >= v.tail(v.size() - 1).norm();
    case ConeType::RotatedSoc:
      return v[0] >= -tol && v[1] >= -tol && 2.0 * (v[0] + tol) * (v[1] + tol) >= v.tail(v.size() - 2).squaredNorm();
    case ConeType::Psd: {
      Matrix m(b.dim, b.dim);
      Index r = 0;
      for (Index i = 0; i < b.dim; ++i)
        for (Index j = i; j < b.dim; ++j) m(i, j) = m(j, i) = v[r++];
      Eigen::SelfAdjointEigenSolver<Matrix> es(m);
      return es.eigenvalues().minCoeff() >= -tol;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("minimize x subject to x - 1 nonnegative") {
  const auto sol = solve(lp_example());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.iterations > 0);
  CHECK(sol.solve_time >= 0.0);
}

TEST_CASE("2x2 PSD Schur complement forces X11 >= 4") {
  const auto sol = solve(sdp_example());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal[0] == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("random SOC programs match the nested search oracle") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const SocInstance s = random_soc(rng);
    const auto sol = solve(soc_program(s));
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(std::abs(sol.objective - soc_oracle(s)) <= 1e-4);
  }
}

TEST_CASE("rotated SOC with an equality") {
  // minimize u + v  s.t. 2uv >= w², w = 3  →  u = v = 3/√2.
  ConicProgram p;
  p.nvars = 3;
  p.objective = Vector(3);
  p.objective << 1.0, 1.0, 0.0;
  BlockBuilder r(ConeType::RotatedSoc, 3, 3);
  r.add(0, 0, 1.0);
  r.add(1, 1, 1.0);
  r.add(2, 2, 1.0);
  p.blocks.push_back(r.finish());
  BlockBuilder e(ConeType::Zero, 1, 3);
  e.add(0, 2, 1.0);
  e.add_offset(0, -3.0);
  p.blocks.push_back(e.finish());
  const auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0 * 3.0 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("infeasible and unbounded programs are reported, not raised") {
  SUBCASE("infeasible") {
    ConicProgram p = lp_example();
    BlockBuilder b(ConeType::Nonneg, 1, 1);
    b.add(0, 0, -1.0);
    p.blocks.push_back(b.finish());  // x <= 0 and x >= 1
    const auto sol = solve(p);
    CHECK(sol.status == SolveStatus::Infeasible);
    CHECK_FALSE(sol.has_primal());
  }
  SUBCASE("unbounded") {
    ConicProgram p = lp_example();
    p.objective[0] = -1.0;
    const auto sol = solve(p);
    CHECK(sol.status == SolveStatus::Unbounded);
    CHECK_FALSE(sol.has_primal());
  }
  SUBCASE("iteration budget") {
    SolverSettings s;
    s.max_iter = 1;
    const auto sol = solve(soc_program({0.3, -0.2, 1.0, 0.4, 0.1}), s);
    CHECK(sol.status == SolveStatus::IterationLimit);
    CHECK(sol.has_primal());
  }
}

TEST_CASE("validate reports malformed programs") {
  CHECK(validate(lp_example()).empty());
  CHECK(validate(sdp_example()).empty());

  SUBCASE("asymmetric full-layout PSD map") {
    ConicProgram p;
    p.nvars = 1;
    p.objective = Vector::Ones(1);
    ConeBlock b;
    b.cone = ConeType::Psd;
    b.dim = 2;
    b.layout = PsdLayout::Full;
    std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}, {1, 0, 1.0}, {3, 0, 1.0}};  // (1,0) set, (0,1) not
    b.map.resize(4, 1);
    b.map.setFromTriplets(t.begin(), t.end());
    b.offset = Vector::Zero(4);
    p.blocks.push_back(b);
    const auto d = validate(p);
    CHECK(d.size() == 1);
    CHECK_THROWS_AS(solve(p), ValidationError);
  }
  SUBCASE("symmetric full-layout PSD map is accepted and solvable") {
    ConicProgram p;
    p.nvars = 1;
    p.objective = Vector::Ones(1);
    ConeBlock b;
    b.cone = ConeType::Psd;
    b.dim = 2;
    b.layout = PsdLayout::Full;
    std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}};
    b.map.resize(4, 1);
    b.map.setFromTriplets(t.begin(), t.end());
    b.offset = Vector(4);
    b.offset << 0.0, 2.0, 2.0, 1.0;
    p.blocks.push_back(b);
    CHECK(validate(p).empty());
    const auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.primal[0] == doctest::Approx(4.0).epsilon(1e-6));
  }
  SUBCASE("NaN objective") {
    ConicProgram p = lp_example();
    p.objective[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK(validate(p).size() == 1);
    CHECK_THROWS_AS(solve(p), ValidationError);
  }
  SUBCASE("bad dimensions") {
    ConicProgram p = lp_example();
    p.nvars = 2;
    CHECK_FALSE(validate(p).empty());
    ConicProgram q = lp_example();
    BlockBuilder s(ConeType::Soc, 1, 1);
    q.blocks.push_back(s.finish());
    CHECK_FALSE(validate(q).empty());
  }
}

TEST_CASE("argmin is invariant under positive objective scaling") {
  std::mt19937 rng(8);
  const SolverSettings settings;
  for (int trial = 0; trial < 10; ++trial) {
    // mixing SOC and LMI programs
    ConicProgram p = trial % 2 ? soc_program(random_soc(rng)) : random_lmi(rng, 3, 3);
    const auto a = solve(p, settings);
    ConicProgram q = p;
    const double lambda = 0.1 + 5.0 * trial;
    q.objective *= lambda;
    const auto b = solve(q, settings);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK((a.primal - b.primal).cwiseAbs().maxCoeff() <= 10.0 * settings.tol * std::max(1.0, a.primal.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("optimal primal points satisfy every block within tolerance") {
  std::mt19937 rng(13);
  const SolverSettings settings;
  for (int trial = 0; trial < 20; ++trial) {
    const ConicProgram p = trial % 2 ? soc_program(random_soc(rng)) : random_lmi(rng, 2 + trial % 4, 2 + trial % 3);
    const auto sol = solve(p, settings);
    REQUIRE(sol.status == SolveStatus::Optimal);
    for (const auto& b : p.blocks) CHECK(image_in_cone(b, sol.primal, settings.tol));
    CHECK(max_violation(p, sol.primal) <= settings.tol);
  }
}

TEST_CASE("solves are deterministic") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const ConicProgram p = random_lmi(rng, 4, 3);
    const auto a = solve(p);
    const auto b = solve(p);
    CHECK(std::abs(a.objective - b.objective) <= 1e-9);
  }
}

TEST_CASE("cone violation measures") {
  Vector v(3);
  v << 1.0, 2.0, 0.0;
  CHECK(cone_violation(ConeType::Soc, 3, v) == doctest::Approx(1.0));
  CHECK(cone_violation(ConeType::Nonneg, 3, v) == 0.0);
  CHECK(cone_violation(ConeType::Zero, 3, v) == doctest::Approx(2.0));
  Vector r(3);
  r << 1.0, 0.5, 1.0;  // 2·1·0.5 = 1 = w²
  CHECK(cone_violation(ConeType::RotatedSoc, 3, r) <= 1e-12);
  Vector s(3);
  s << 1.0, 2.0, 1.0;  // [[1,2],[2,1]] has λmin = -1
  CHECK(cone_violation(ConeType::Psd, 2, s) == doctest::Approx(1.0));
}

TEST_CASE("CBF export is byte stable") {
  ConicProgram p = sdp_example();
  BlockBuilder b(ConeType::Nonneg, 1, 1);
  b.add(0, 0, 1.0);
  b.add_offset(0, -0.5);
  p.blocks.push_back(b.finish());
  std::ostringstream os;
  write_cbf(os, p);
  const std::string expect =
      "VER\n3\n\n"
      "OBJSENSE\nMIN\n\n"
      "VAR\n1 1\nF 1\n\n"
      "PSDCON\n1\n2\n\n"
      "CON\n1 1\nL+ 1\n\n"
      "OBJACOORD\n1\n0 1\n\n"
      "ACOORD\n1\n0 0 1\n\n"
      "BCOORD\n1\n0 -0.5\n\n"
      "HCOORD\n1\n0 0 0 0 1\n\n"
      "DCOORD\n2\n0 1 0 2\n0 1 1 1\n\n";
  CHECK(os.str() == expect);
  std::ostringstream again;
  write_cbf(again, p);
  CHECK(again.str() == os.str());
}

TEST_CASE("tolerance can be overridden from the environment") {
  ::setenv("SEQBMI_CONIC_TOL", "1e-6", 1);
  CHECK(settings_from_env().tol == doctest::Approx(1e-6));
  ::setenv("SEQBMI_CONIC_TOL", "garbage", 1);
  CHECK(settings_from_env().tol == doctest::Approx(1e-8));
  ::unsetenv("SEQBMI_CONIC_TOL");
  CHECK(settings_from_env().tol == doctest::Approx(1e-8));
  CHECK(settings_from_env().max_iter == 200);
}
