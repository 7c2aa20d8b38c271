#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace seqbmi {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix. Every mutation writes both triangles, so
/// entries(i, j) == entries(j, i) holds bit-for-bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index dim);
  /// Takes ownership of `m`; throws ValidationError unless `m` is square,
  /// finite and exactly symmetric.
  explicit SymMatrix(Matrix m);

  /// (m + mᵀ)/2 with the upper triangle mirrored, for inputs that are
  /// symmetric only up to rounding.
  static SymMatrix symmetrize(const Matrix& m);
  static SymMatrix identity(Index dim);
  static SymMatrix outer(const Vector& v);

  Index dim() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  void set(Index i, Index j, double value);
  void add(Index i, Index j, double value);

  const Matrix& dense() const { return m_; }
  double trace() const { return m_.trace(); }

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double alpha);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double alpha, SymMatrix a) { return a *= alpha; }

  bool operator==(const SymMatrix& other) const {
    return m_.rows() == other.m_.rows() && m_ == other.m_;
  }

 private:
  Matrix m_;
};

/// Unique entries of a symmetric matrix, row-major upper triangle
/// (diagonal included), off-diagonals unscaled.
class SymVec {
 public:
  SymVec() = default;
  /// Throws DimensionError unless data.size() == n(n+1)/2 for some n >= 1.
  explicit SymVec(Vector data);

  Index dim() const { return dim_; }
  const Vector& data() const { return data_; }
  Index size() const { return data_.size(); }
  double operator[](Index k) const { return data_[k]; }

  bool operator==(const SymVec& other) const {
    return dim_ == other.dim_ && data_ == other.data_;
  }

 private:
  Index dim_ = 0;
  Vector data_;
};

/// n(n+1)/2.
constexpr Index svec_length(Index n) { return n * (n + 1) / 2; }

/// Position of (i, j) inside svec of an n x n matrix; order of i, j is free.
Index svec_index(Index n, Index i, Index j);

/// Inverse of svec_length; throws DimensionError when `len` is not triangular.
Index side_for_svec_length(Index len);

SymVec svec(const SymMatrix& m);
SymMatrix smat(const SymVec& v);

/// Solves A P + P Aᵀ + Q = 0 by complex Schur (Bartels-Stewart).
/// Throws SingularPencilError when some eigenvalue pair has
/// lambda_i + conj(lambda_j) ~ 0.
SymMatrix solve_lyapunov(const Matrix& a, const SymMatrix& q);

/// Spectral abscissa max Re(lambda(A)).
double max_real_eig(const Matrix& a);

double min_eig_sym(const SymMatrix& m);
double max_eig_sym(const SymMatrix& m);

}  // namespace seqbmi
