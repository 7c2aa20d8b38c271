#pragma once

#include "seqbmi/bmi_problem.hpp"
#include "seqbmi/lti.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace seqbmi {

/// K(h) = Σ h_i E_i over binary nu × ny matrices with disjoint supports.
class ControllerStructure {
 public:
  /// Throws ValidationError unless the basis is non-empty, binary, of one
  /// common shape and pairwise disjoint.
  explicit ControllerStructure(std::vector<Matrix> basis);

  /// One basis matrix per entry, row-major.
  static ControllerStructure centralized(Index nu, Index ny);
  /// Entries (i, i), i < min(nu, ny).
  static ControllerStructure diagonal(Index nu, Index ny);
  /// One basis matrix per nonzero of `mask`, row-major.
  static ControllerStructure from_mask(const Matrix& mask);

  Index size() const { return static_cast<Index>(basis_.size()); }
  Index nu() const { return basis_.front().rows(); }
  Index ny() const { return basis_.front().cols(); }
  const std::vector<Matrix>& basis() const { return basis_; }
  /// Union of the supports.
  Matrix mask() const;

 private:
  std::vector<Matrix> basis_;
};

Matrix controller_gain(const Vector& h, const ControllerStructure& s);

enum class Scaling { Standard, Identity };

struct SynthesisProblem {
  NormKind kind = NormKind::H2;
  Plant plant;
  ControllerStructure structure{std::vector<Matrix>{Matrix::Ones(1, 1)}};
  /// Problem in the unscaled variables.
  BmiProblem raw;
  /// Problem in x̃ = diag(varmap.scale)·raw variables; this is what gets solved.
  BmiProblem bmi;
  VarMap varmap;
  Index h_offset = 0;
  /// Variables multiplied in some bilinear product, by group.
  std::set<Index> bilinear_vars;
};

/// Variables [svec W, svec P, h] (W is nz × nz, P is nx × nx), side 2nx+nz.
/// Requires D11 = 0 and D21 = 0.
SynthesisProblem build_h2(const Plant& p, const ControllerStructure& s, double eta, Scaling scaling = Scaling::Standard);

/// Variables [svec Q, h, γ], side 2nx+nz+nw. Requires D21 = 0.
SynthesisProblem build_hinf(const Plant& p, const ControllerStructure& s, double eta, Scaling scaling = Scaling::Standard);

SynthesisProblem build_synthesis(NormKind kind, const Plant& p, const ControllerStructure& s, double eta,
                                 Scaling scaling = Scaling::Standard);

/// 1 on `bilinear_vars`, min(0.5η, 0.01) elsewhere.
Vector scale_vector(const VarMap& varmap, double eta, const std::set<Index>& bilinear_vars);

/// Variables with a nonzero coefficient in some bilinear term.
std::set<Index> bilinear_participation(const BmiProblem& prob);

/// Unscaled variable vectors.
Vector pack_h2(const SymMatrix& w, const SymMatrix& p, const Vector& h);
Vector pack_hinf(const SymMatrix& q, const Vector& h, double gamma);

struct ControllerResult {
  Vector raw;  // unscaled variable vector
  Vector h;
  Matrix K;
  /// tr W (H2) or γ (H∞).
  double bound = 0.0;
  double max_real_eig = 0.0;
  bool stabilizing = false;
  /// Closed-loop norm, infinity when A_cl is not Hurwitz.
  double norm = 0.0;
};

ControllerResult extract_controller(const Vector& x_scaled, const SynthesisProblem& sp);

}  // namespace seqbmi
