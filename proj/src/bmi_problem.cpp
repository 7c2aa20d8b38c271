#include "seqbmi/bmi_problem.hpp"

#include "seqbmi/errors.hpp"

#include <algorithm>
#include <set>

namespace seqbmi {

namespace {

std::string key_name(Index i, Index j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

BmiProblem::BmiProblem(Vector objective, SymMatrix f0, std::vector<LinearTerm> linear,
                       std::vector<BilinearTerm> bilinear)
    : objective_(std::move(objective)),
      f0_(std::move(f0)),
      linear_(std::move(linear)),
      bilinear_(std::move(bilinear)) {
  const Index n = objective_.size();
  const Index m = f0_.dim();
  if (!objective_.allFinite()) throw ValidationError("BmiProblem: non-finite objective entry");
  std::set<Index> seen_linear;
  for (const auto& t : linear_) {
    if (t.var < 0 || t.var >= n) throw ValidationError("BmiProblem: linear index " + std::to_string(t.var) + " out of range");
    if (t.coeff.dim() != m) throw ValidationError("BmiProblem: K_" + std::to_string(t.var) + " has wrong side");
    if (!seen_linear.insert(t.var).second) throw ValidationError("BmiProblem: duplicate K_" + std::to_string(t.var));
  }
  std::set<std::pair<Index, Index>> seen_bilinear;
  for (const auto& t : bilinear_) {
    if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n) throw ValidationError("BmiProblem: bilinear index " + key_name(t.i, t.j) + " out of range");
    if (t.i > t.j) throw ValidationError("BmiProblem: bilinear key " + key_name(t.i, t.j) + " must have i <= j");
    if (t.coeff.dim() != m) throw ValidationError("BmiProblem: L" + key_name(t.i, t.j) + " has wrong side");
    if (!seen_bilinear.insert({t.i, t.j}).second) throw ValidationError("BmiProblem: duplicate L" + key_name(t.i, t.j));
  }
  std::sort(linear_.begin(), linear_.end(), [](const auto& a, const auto& b) { return a.var < b.var; });
  std::sort(bilinear_.begin(), bilinear_.end(),
            [](const auto& a, const auto& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
}

BmiProblem BmiProblem::rescaled(const Vector& scale) const {
  if (scale.size() != num_vars()) throw DimensionError("rescaled: scale length mismatch");
  if ((scale.array() <= 0.0).any()) throw ValidationError("rescaled: scale entries must be positive");
  Vector c = objective_.cwiseQuotient(scale);
  std::vector<LinearTerm> lin;
  lin.reserve(linear_.size());
  for (const auto& t : linear_) lin.push_back({t.var, (1.0 / scale[t.var]) * t.coeff});
  std::vector<BilinearTerm> bil;
  bil.reserve(bilinear_.size());
  for (const auto& t : bilinear_) bil.push_back({t.i, t.j, (1.0 / (scale[t.i] * scale[t.j])) * t.coeff});
  return BmiProblem(std::move(c), f0_, std::move(lin), std::move(bil));
}

BmiBuilder::BmiBuilder(Index num_vars, Index side)
    : num_vars_(num_vars), side_(side), objective_(Vector::Zero(num_vars)), f0_(Matrix::Zero(side, side)) {}

Matrix& BmiBuilder::linear(Index var) {
  if (var < 0 || var >= num_vars_) throw DimensionError("BmiBuilder: variable index out of range");
  auto [it, inserted] = linear_.try_emplace(var);
  if (inserted) it->second = Matrix::Zero(side_, side_);
  return it->second;
}

Matrix& BmiBuilder::bilinear(Index a, Index b) {
  if (a < 0 || b < 0 || a >= num_vars_ || b >= num_vars_) throw DimensionError("BmiBuilder: variable index out of range");
  auto [it, inserted] = bilinear_.try_emplace({std::min(a, b), std::max(a, b)});
  if (inserted) it->second = Matrix::Zero(side_, side_);
  return it->second;
}

namespace {

SymMatrix checked_symmetric(const Matrix& m, const std::string& what) {
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw ValidationError("BmiBuilder: " + what + " is not symmetric");
  }
  return SymMatrix::symmetrize(m);
}

}  // namespace

BmiProblem BmiBuilder::finish() const {
  std::vector<LinearTerm> lin;
  for (const auto& [k, m] : linear_) {
    if (m.cwiseAbs().maxCoeff() == 0.0) continue;
    lin.push_back({k, checked_symmetric(m, "K_" + std::to_string(k))});
  }
  std::vector<BilinearTerm> bil;
  for (const auto& [key, m] : bilinear_) {
    if (m.cwiseAbs().maxCoeff() == 0.0) continue;
    bil.push_back({key.first, key.second, checked_symmetric(m, "L" + key_name(key.first, key.second))});
  }
  return BmiProblem(objective_, checked_symmetric(f0_, "F0"), std::move(lin), std::move(bil));
}

Index VarMap::find(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<Index>(it - names.begin());
}

SymMatrix eval_p(const BmiProblem& prob, const Vector& x, const SymMatrix& lifted) {
  if (x.size() != prob.num_vars() || lifted.dim() != prob.num_vars()) {
    throw DimensionError("eval_p: expected x and X of size " + std::to_string(prob.num_vars()) + ", got " +
                         std::to_string(x.size()) + " and " + std::to_string(lifted.dim()));
  }
  Matrix acc = prob.constant().dense();
  for (const auto& t : prob.linear()) acc.noalias() += x[t.var] * t.coeff.dense();
  for (const auto& t : prob.bilinear()) acc.noalias() += lifted(t.i, t.j) * t.coeff.dense();
  return SymMatrix::symmetrize(acc);
}

double bmi_residual(const BmiProblem& prob, const Vector& x) {
  return std::max(0.0, max_eig_sym(eval_p(prob, x, SymMatrix::outer(x))));
}

double lift_residual(const Vector& x, const SymMatrix& lifted) {
  if (x.size() != lifted.dim()) throw DimensionError("lift_residual: dimension mismatch");
  return lifted.trace() - x.squaredNorm();
}

}  // namespace seqbmi
