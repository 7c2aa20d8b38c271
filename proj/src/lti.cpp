#include "seqbmi/lti.hpp"

#include "seqbmi/errors.hpp"
#include "seqbmi/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace seqbmi {

namespace {

void expect_shape(const char* name, const Matrix& m, Index rows, Index cols) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string("plant: ") + name + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!m.allFinite()) throw ValidationError(std::string("plant: ") + name + " has non-finite entries");
}

void require_hurwitz(const Matrix& a, const char* what) {
  if (a.rows() == 0) return;
  if (!(max_real_eig(a) < 0.0)) throw UnstableSystemError(std::string(what) + ": A is not Hurwitz");
}

// Imaginary-axis eigenvalue frequencies of the Hamiltonian at level γ.
std::vector<double> crossing_frequencies(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, double gamma) {
  const Index n = a.rows();
  const Index m = b.cols();
  const Index p = c.rows();
  const Matrix r = d.transpose() * d - gamma * gamma * Matrix::Identity(m, m);
  const Matrix s = d * d.transpose() - gamma * gamma * Matrix::Identity(p, p);
  const Eigen::PartialPivLU<Matrix> rlu(r);
  const Eigen::PartialPivLU<Matrix> slu(s);
  const Matrix rinv_bt = rlu.solve(b.transpose());
  const Matrix rinv_dtc = rlu.solve(d.transpose() * c);
  Matrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = a - b * rinv_dtc;
  h.topRightCorner(n, n) = -gamma * b * rinv_bt;
  h.bottomLeftCorner(n, n) = gamma * c.transpose() * slu.solve(c);
  h.bottomRightCorner(n, n) = -a.transpose() + c.transpose() * d * rinv_bt;
  Eigen::EigenSolver<Matrix> es(h, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("hinf_norm: Hamiltonian eigenvalues did not converge");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  std::vector<double> out;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> lam = es.eigenvalues()[i];
    if (lam.imag() >= 0.0 && std::abs(lam.real()) <= 1e-7 * scale) out.push_back(lam.imag());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void Plant::check() const {
  if (A.rows() != A.cols()) throw DimensionError("plant: A is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) + ", expected square");
  const Index n = nx();
  expect_shape("A", A, n, n);
  expect_shape("B1", B1, n, B1.cols());
  expect_shape("B", B, n, B.cols());
  expect_shape("C1", C1, C1.rows(), n);
  expect_shape("C", C, C.rows(), n);
  expect_shape("D11", D11, nz(), nw());
  expect_shape("D12", D12, nz(), nu());
  expect_shape("D21", D21, ny(), nw());
}

ClosedLoop closed_loop(const Plant& p, const Matrix& k) {
  if (k.rows() != p.nu() || k.cols() != p.ny()) {
    throw DimensionError("closed_loop: K is " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) + ", expected " +
                         std::to_string(p.nu()) + "x" + std::to_string(p.ny()));
  }
  return {p.A + p.B * k * p.C, p.B1 + p.B * k * p.D21, p.C1 + p.D12 * k * p.C, p.D11 + p.D12 * k * p.D21};
}

const char* to_string(NormKind kind) { return kind == NormKind::H2 ? "h2" : "hinf"; }

NormKind parse_norm_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "h2") return NormKind::H2;
  if (s == "hinf") return NormKind::Hinf;
  throw ValidationError("unknown norm '" + name + "' (expected h2 or hinf)");
}

double h2_norm(const Matrix& a, const Matrix& b, const Matrix& c) {
  require_hurwitz(a, "h2_norm");
  const SymMatrix p = solve_lyapunov(a, SymMatrix::symmetrize(b * b.transpose()));
  return (c * p.dense() * c.transpose()).trace();
}

double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  require_hurwitz(a, "hinf_norm");
  const Index n = a.rows();
  const double sigma_d = d.size() ? Eigen::JacobiSVD<Matrix>(d).singularValues()[0] : 0.0;
  if (n == 0 || b.cols() == 0 || c.rows() == 0) return sigma_d;

  // Lower bound from D, DC gain, the most resonant pole and a coarse sweep.
  std::vector<double> omegas = {0.0};
  Eigen::EigenSolver<Matrix> es(a, false);
  double spread = 1.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto lam = es.eigenvalues()[i];
    omegas.push_back(std::abs(lam));
    if (lam.imag() != 0.0) omegas.push_back(std::abs(lam.imag()));
    spread = std::max(spread, std::abs(lam));
  }
  for (int i = 0; i <= 60; ++i) omegas.push_back(spread * std::pow(10.0, -4.0 + 6.0 * i / 60.0));
  double lower = std::max(sigma_d, kernels::peak_gain_parallel(a, b, c, d, omegas));
  if (lower == 0.0) return 0.0;

  constexpr double rel_tol = 1e-6;
  for (int iter = 0; iter < 100; ++iter) {
    const double gamma = (1.0 + 2.0 * rel_tol) * lower;
    const std::vector<double> w = crossing_frequencies(a, b, c, d, gamma);
    if (w.empty()) return 0.5 * (lower + gamma);
    double next = lower;
    for (std::size_t i = 0; i < w.size(); ++i) {
      next = std::max(next, kernels::gain_at(a, b, c, d, w[i]));
      if (i + 1 < w.size()) next = std::max(next, kernels::gain_at(a, b, c, d, 0.5 * (w[i] + w[i + 1])));
    }
    if (next <= gamma) return 0.5 * (lower + gamma);
    lower = next;
  }
  return lower;
}

double closed_loop_norm(const ClosedLoop& cl, NormKind kind) {
  if (!(max_real_eig(cl.A) < 0.0)) return std::numeric_limits<double>::infinity();
  if (kind == NormKind::H2) {
    if (cl.D.size() && cl.D.cwiseAbs().maxCoeff() > 0.0) return std::numeric_limits<double>::infinity();
    return h2_norm(cl.A, cl.B, cl.C);
  }
  return hinf_norm(cl.A, cl.B, cl.C, cl.D);
}

double open_loop_norm(const Plant& p, NormKind kind) {
  return closed_loop_norm({p.A, p.B1, p.C1, p.D11}, kind);
}

bool certify_stability(const Matrix& a_cl) {
  return max_real_eig(a_cl) < kStabilityMargin;
}

SymMatrix regularize_b1(const Matrix& b1) {
  SymMatrix g = SymMatrix::symmetrize(b1 * b1.transpose());
  if (g.dim() == 0) return g;
  if (min_eig_sym(g) > 0.0) return g;
  return g + 1e-5 * SymMatrix::identity(g.dim());
}

}  // namespace seqbmi
