#pragma once

#include "seqbmi/sym_linalg.hpp"

#include <string>

namespace seqbmi {

/// ẋ = A x + B1 w + B u,  z = C1 x + D11 w + D12 u,  y = C x + D21 w.
struct Plant {
  std::string name;
  Matrix A, B1, B, C1, C, D11, D12, D21;

  Index nx() const { return A.rows(); }
  Index nw() const { return B1.cols(); }
  Index nu() const { return B.cols(); }
  Index nz() const { return C1.rows(); }
  Index ny() const { return C.rows(); }

  /// Throws DimensionError naming the first inconsistent matrix, or
  /// ValidationError on non-finite entries.
  void check() const;
};

struct ClosedLoop {
  Matrix A, B, C, D;
};

/// A + BKC, B1 + BKD21, C1 + D12KC, D11 + D12KD21.
ClosedLoop closed_loop(const Plant& p, const Matrix& k);

enum class NormKind { H2, Hinf };

const char* to_string(NormKind kind);
/// "h2" or "hinf"; throws ValidationError otherwise.
NormKind parse_norm_kind(const std::string& name);

/// tr(C P Cᵀ) with A P + P Aᵀ + B Bᵀ = 0 (squared H2 norm). Throws
/// UnstableSystemError unless A is Hurwitz.
double h2_norm(const Matrix& a, const Matrix& b, const Matrix& c);

/// sup_ω σ_max(C (jωI - A)⁻¹ B + D) to relative accuracy 1e-6, by
/// Hamiltonian level-set iteration. Throws UnstableSystemError unless A is
/// Hurwitz.
double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d);

double closed_loop_norm(const ClosedLoop& cl, NormKind kind);

/// Norm of (A, B1, C1, D11); infinity when A is not Hurwitz (or, for H2,
/// when D11 != 0).
double open_loop_norm(const Plant& p, NormKind kind);

inline constexpr double kStabilityMargin = 1e-5;

/// max Re λ(A) < 1e-5.
bool certify_stability(const Matrix& a_cl);

/// B1 B1ᵀ, shifted by 1e-5·I unless it is positive definite.
SymMatrix regularize_b1(const Matrix& b1);

}  // namespace seqbmi
