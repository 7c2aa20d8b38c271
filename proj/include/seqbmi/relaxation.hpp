#pragma once

#include "seqbmi/bmi_problem.hpp"
#include "seqbmi/conic.hpp"

#include <string>
#include <vector>

namespace seqbmi {

/// Cone C that X - xxᵀ is restricted to.
///   SDP:       H ⪰ 0
///   SOCP:      H_ii >= 0, H_ii H_jj >= H_ij²
///   PARABOLIC: H_ii >= 0, H_ii + H_jj >= 2|H_ij|
enum class ConeKind { Sdp, Socp, Parabolic };

const char* to_string(ConeKind cone);
/// Accepts "sdp", "socp", "parabolic" (any case); throws ValidationError.
ConeKind parse_cone_kind(const std::string& name);

inline constexpr ConeKind kAllCones[] = {ConeKind::Sdp, ConeKind::Socp, ConeKind::Parabolic};

struct PenaltyConfig {
  double eta = 1.0;
  Vector anchor;

  /// Throws ValidationError unless eta > 0 and the anchor is finite.
  void check(Index n) const;
};

/// Decision vector of a relaxation: [x (n), svec(X)].
struct LiftLayout {
  Index n = 0;

  Index nvars() const { return n + svec_length(n); }
  Index x(Index i) const { return i; }
  Index lifted(Index i, Index j) const { return n + svec_index(n, i, j); }
};

struct LiftedPoint {
  Vector x;
  SymMatrix lifted;
};

LiftedPoint split_lifted(const Vector& z, Index n);
Vector join_lifted(const Vector& x, const SymMatrix& lifted);

/// Constraint blocks over [x, svec(X)] expressing X - xxᵀ ∈ C.
std::vector<ConeBlock> encode_cone(ConeKind cone, Index n);

/// minimize cᵀx  s.t.  p(x, X) ⪯ 0,  X - xxᵀ ∈ C.
ConicProgram build_relaxation(const BmiProblem& prob, ConeKind cone);

/// The relaxation with objective cᵀx + η(tr X - 2x̌ᵀx + x̌ᵀx̌).
ConicProgram build_penalized(const BmiProblem& prob, ConeKind cone, const PenaltyConfig& pen);

/// η(tr X - 2x̌ᵀx + x̌ᵀx̌).
double penalty_value(const Vector& x, const SymMatrix& lifted, const PenaltyConfig& pen);

/// Whether H + tol·I lies in the cone.
bool in_cone(ConeKind cone, const SymMatrix& h, double tol);
inline bool in_cone(ConeKind cone, const Vector& x, const SymMatrix& lifted, double tol) {
  return in_cone(cone, lifted - SymMatrix::outer(x), tol);
}

}  // namespace seqbmi
