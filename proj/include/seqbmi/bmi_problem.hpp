#pragma once

#include "seqbmi/sym_linalg.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace seqbmi {

struct LinearTerm {
  Index var = 0;
  SymMatrix coeff;
};

/// Coefficient of the product x_i x_j (i <= j). For i < j this is the
/// combined L_ij + L_ji, applied once to X_ij.
struct BilinearTerm {
  Index i = 0;
  Index j = 0;
  SymMatrix coeff;
};

/// minimize cᵀx  s.t.  p(x, xxᵀ) ⪯ 0, with
/// p(x, X) = F0 + Σ_k x_k K_k + Σ_{i<=j} X_ij L_ij.
/// Variable indices are 0-based.
class BmiProblem {
 public:
  BmiProblem() = default;
  /// Throws ValidationError on out-of-range or duplicate indices, i > j
  /// keys, or coefficient matrices whose side differs from F0's.
  BmiProblem(Vector objective, SymMatrix f0, std::vector<LinearTerm> linear,
             std::vector<BilinearTerm> bilinear);

  Index num_vars() const { return objective_.size(); }
  Index side() const { return f0_.dim(); }
  const Vector& objective() const { return objective_; }
  const SymMatrix& constant() const { return f0_; }
  const std::vector<LinearTerm>& linear() const { return linear_; }
  const std::vector<BilinearTerm>& bilinear() const { return bilinear_; }

  /// Same problem in the coordinates x̃ = diag(scale)·x.
  BmiProblem rescaled(const Vector& scale) const;

 private:
  Vector objective_;
  SymMatrix f0_;
  std::vector<LinearTerm> linear_;
  std::vector<BilinearTerm> bilinear_;
};

/// Accumulates dense coefficient matrices keyed by variable (pair), then
/// drops the all-zero ones on finish().
class BmiBuilder {
 public:
  BmiBuilder(Index num_vars, Index side);

  Index num_vars() const { return num_vars_; }
  Index side() const { return side_; }

  Vector& objective() { return objective_; }
  Matrix& constant() { return f0_; }
  Matrix& linear(Index var);
  Matrix& bilinear(Index a, Index b);

  /// Throws ValidationError if any accumulated matrix is not symmetric
  /// (within 1e-12 relative); the stored coefficient is symmetrized.
  BmiProblem finish() const;

 private:
  Index num_vars_;
  Index side_;
  Vector objective_;
  Matrix f0_;
  std::map<Index, Matrix> linear_;
  std::map<std::pair<Index, Index>, Matrix> bilinear_;
};

/// Semantic labels and coordinate scaling of the BMI variable vector.
struct VarMap {
  std::vector<std::string> names;
  Vector scale;

  Index size() const { return static_cast<Index>(names.size()); }
  /// -1 when absent.
  Index find(const std::string& name) const;
};

SymMatrix eval_p(const BmiProblem& prob, const Vector& x, const SymMatrix& lifted);

/// max(0, λ_max(p(x, xxᵀ))).
double bmi_residual(const BmiProblem& prob, const Vector& x);

/// tr(X) - xᵀx.
double lift_residual(const Vector& x, const SymMatrix& lifted);

}  // namespace seqbmi
