#include "seqbmi/sym_linalg.hpp"

#include "seqbmi/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace seqbmi {

SymMatrix::SymMatrix(Index dim) : m_(Matrix::Zero(dim, dim)) {
  if (dim < 0) throw DimensionError("SymMatrix: negative dimension");
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw ValidationError("SymMatrix: matrix is " + std::to_string(m_.rows()) + "x" +
                          std::to_string(m_.cols()) + ", not square");
  }
  if (!m_.allFinite()) throw ValidationError("SymMatrix: non-finite entry");
  for (Index i = 0; i < m_.rows(); ++i) {
    for (Index j = i + 1; j < m_.cols(); ++j) {
      if (m_(i, j) != m_(j, i)) {
        throw ValidationError("SymMatrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") differs from its transpose");
      }
    }
  }
}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("symmetrize: matrix not square");
  Matrix s = 0.5 * (m + m.transpose());
  s.triangularView<Eigen::StrictlyLower>() = s.transpose().triangularView<Eigen::StrictlyLower>();
  return SymMatrix(std::move(s));
}

SymMatrix SymMatrix::identity(Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::outer(const Vector& v) {
  SymMatrix out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    for (Index j = i; j < v.size(); ++j) out.set(i, j, v[i] * v[j]);
  }
  return out;
}

void SymMatrix::set(Index i, Index j, double value) {
  m_(i, j) = value;
  m_(j, i) = value;
}

void SymMatrix::add(Index i, Index j, double value) {
  if (i == j) {
    m_(i, i) += value;
  } else {
    m_(i, j) += value;
    m_(j, i) = m_(i, j);
  }
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (dim() != other.dim()) throw DimensionError("SymMatrix +=: dimension mismatch");
  m_ += other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  if (dim() != other.dim()) throw DimensionError("SymMatrix -=: dimension mismatch");
  m_ -= other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double alpha) {
  m_ *= alpha;
  return *this;
}

Index svec_index(Index n, Index i, Index j) {
  if (i > j) std::swap(i, j);
  // rows 0..i-1 contribute n, n-1, ..., n-i+1 entries
  return i * n - i * (i - 1) / 2 + (j - i);
}

Index side_for_svec_length(Index len) {
  if (len <= 0) throw DimensionError("svec length must be positive");
  const auto n = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0));
  if (svec_length(n) != len) {
    throw DimensionError("svec length " + std::to_string(len) + " is not of the form n(n+1)/2");
  }
  return n;
}

SymVec::SymVec(Vector data) : dim_(side_for_svec_length(data.size())), data_(std::move(data)) {}

SymVec svec(const SymMatrix& m) {
  const Index n = m.dim();
  Vector v(svec_length(n));
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) v[k++] = m(i, j);
  }
  return SymVec(std::move(v));
}

SymMatrix smat(const SymVec& v) {
  const Index n = v.dim();
  SymMatrix m(n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) m.set(i, j, v[k++]);
  }
  return m;
}

SymMatrix solve_lyapunov(const Matrix& a, const SymMatrix& q) {
  const Index n = a.rows();
  if (a.cols() != n || q.dim() != n) throw DimensionError("solve_lyapunov: dimension mismatch");
  if (n == 0) return SymMatrix(0);

  using Complex = std::complex<double>;
  using CMatrix = Eigen::MatrixXcd;
  Eigen::ComplexSchur<Matrix> schur(a);
  if (schur.info() != Eigen::Success) throw ConvergenceError("solve_lyapunov: Schur iteration failed");
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();

  // T Y + Y Tᴴ = -Uᴴ Q U with Y = Uᴴ P U; back-substitute from the bottom-right corner.
  CMatrix c = -(u.adjoint() * q.dense().cast<Complex>() * u);
  CMatrix y = CMatrix::Zero(n, n);
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  for (Index i = n - 1; i >= 0; --i) {
    for (Index j = n - 1; j >= 0; --j) {
      Complex rhs = c(i, j);
      for (Index k = i + 1; k < n; ++k) rhs -= t(i, k) * y(k, j);
      for (Index k = j + 1; k < n; ++k) rhs -= y(i, k) * std::conj(t(j, k));
      const Complex denom = t(i, i) + std::conj(t(j, j));
      if (std::abs(denom) <= 1e3 * std::numeric_limits<double>::epsilon() * scale) {
        throw SingularPencilError("solve_lyapunov: eigenvalues " + std::to_string(i) + " and " +
                                  std::to_string(j) + " sum to ~0");
      }
      y(i, j) = rhs / denom;
    }
  }
  const Matrix p = (u * y * u.adjoint()).real();
  return SymMatrix::symmetrize(p);
}

double max_real_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("max_real_eig: matrix not square");
  if (!a.allFinite()) throw ValidationError("max_real_eig: non-finite entry");
  if (a.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("max_real_eig: eigenvalue iteration did not converge");
  return es.eigenvalues().real().maxCoeff();
}

double min_eig_sym(const SymMatrix& m) {
  if (m.dim() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double max_eig_sym(const SymMatrix& m) {
  if (m.dim() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[m.dim() - 1];
}

}  // namespace seqbmi
