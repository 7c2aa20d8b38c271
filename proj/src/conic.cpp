#include "seqbmi/conic.hpp"

#include "interior_point.hpp"
#include "seqbmi/errors.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <string>

namespace seqbmi {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

bool sparse_finite(const SparseMatrix& m) {
  for (Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (!std::isfinite(it.value())) return false;
    }
  }
  return true;
}

// Rows of a block re-expressed in the internal cone coordinates, as a dense
// (row → {var → coeff}) table plus offsets.
struct InternalRows {
  std::vector<std::map<Index, double>> coeff;
  Vector offset;
};

InternalRows internal_rows(const ConeBlock& b) {
  InternalRows out;
  const Index rows = b.rows();
  std::vector<std::map<Index, double>> raw(static_cast<std::size_t>(rows));
  for (Index r = 0; r < rows; ++r) {
    for (SparseMatrix::InnerIterator it(b.map, r); it; ++it) {
      if (it.value() != 0.0) raw[static_cast<std::size_t>(r)][it.col()] += it.value();
    }
  }
  switch (b.cone) {
    case ConeType::Zero:
    case ConeType::Nonneg:
    case ConeType::Soc:
      out.coeff = std::move(raw);
      out.offset = b.offset;
      break;
    case ConeType::RotatedSoc: {
      // (u, v, w) with 2uv >= ‖w‖²  ->  ((u+v)/√2, (u-v)/√2, w) in the SOC
      out.coeff = raw;
      out.offset = b.offset;
      out.coeff[0].clear();
      out.coeff[1].clear();
      for (const auto& [j, val] : raw[0]) {
        out.coeff[0][j] += val / kSqrt2;
        out.coeff[1][j] += val / kSqrt2;
      }
      for (const auto& [j, val] : raw[1]) {
        out.coeff[0][j] += val / kSqrt2;
        out.coeff[1][j] -= val / kSqrt2;
      }
      out.offset[0] = (b.offset[0] + b.offset[1]) / kSqrt2;
      out.offset[1] = (b.offset[0] - b.offset[1]) / kSqrt2;
      break;
    }
    case ConeType::Psd: {
      const Index n = b.dim;
      out.coeff.resize(static_cast<std::size_t>(svec_length(n)));
      out.offset.resize(svec_length(n));
      Index k = 0;
      for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j, ++k) {
          const Index src = b.layout == PsdLayout::Svec ? svec_index(n, i, j) : j * n + i;
          const double f = i == j ? 1.0 : kSqrt2;
          for (const auto& [var, val] : raw[static_cast<std::size_t>(src)]) out.coeff[static_cast<std::size_t>(k)][var] = f * val;
          out.offset[k] = f * b.offset[src];
        }
      }
      break;
    }
  }
  return out;
}

detail::StandardForm standard_form(const ConicProgram& prog) {
  detail::StandardForm f;
  f.n = prog.nvars;
  // Work with a normalized objective.
  const double cmax = prog.objective.size() ? prog.objective.cwiseAbs().maxCoeff() : 0.0;
  f.c = cmax > 0.0 ? Vector(prog.objective / cmax) : prog.objective;
  std::vector<std::map<Index, double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<double> h;
  for (const auto& block : prog.blocks) {
    InternalRows rows = internal_rows(block);
    if (block.cone == ConeType::Zero) {
      for (std::size_t r = 0; r < rows.coeff.size(); ++r) {
        eq_rows.push_back(rows.coeff[r]);
        eq_rhs.push_back(-rows.offset[static_cast<Index>(r)]);
      }
      continue;
    }
    detail::ConeKind kind = detail::ConeKind::Nonneg;
    Index dim = block.dim;
    if (block.cone == ConeType::Soc || block.cone == ConeType::RotatedSoc) kind = detail::ConeKind::Soc;
    if (block.cone == ConeType::Psd) kind = detail::ConeKind::Psd;
    f.cones.add(kind, dim);

    std::map<Index, Index> local;
    for (const auto& row : rows.coeff) {
      for (const auto& [j, val] : row) local.emplace(j, 0);
    }
    kernels::ColumnSlice slice;
    for (auto& [j, pos] : local) {
      pos = static_cast<Index>(slice.columns.size());
      slice.columns.push_back(j);
    }
    slice.values = Matrix::Zero(static_cast<Index>(rows.coeff.size()), static_cast<Index>(slice.columns.size()));
    for (std::size_t r = 0; r < rows.coeff.size(); ++r) {
      for (const auto& [j, val] : rows.coeff[r]) slice.values(static_cast<Index>(r), local[j]) = -val;
      h.push_back(rows.offset[static_cast<Index>(r)]);
    }
    f.g.push_back(std::move(slice));
  }
  f.h = Eigen::Map<const Vector>(h.data(), static_cast<Index>(h.size()));
  f.a = Matrix::Zero(static_cast<Index>(eq_rows.size()), f.n);
  f.b = Vector(static_cast<Index>(eq_rows.size()));
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    for (const auto& [j, val] : eq_rows[r]) f.a(static_cast<Index>(r), j) = val;
    f.b[static_cast<Index>(r)] = eq_rhs[r];
  }
  return f;
}

}  // namespace

const char* to_string(ConeType cone) {
  switch (cone) {
    case ConeType::Zero: return "ZERO";
    case ConeType::Nonneg: return "NONNEG";
    case ConeType::Soc: return "SOC";
    case ConeType::RotatedSoc: return "ROTATED_SOC";
    case ConeType::Psd: return "PSD";
  }
  return "?";
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::Infeasible: return "INFEASIBLE";
    case SolveStatus::Unbounded: return "UNBOUNDED";
    case SolveStatus::NumericalLimit: return "NUMERICAL_LIMIT";
    case SolveStatus::IterationLimit: return "ITERATION_LIMIT";
  }
  return "?";
}

BlockBuilder::BlockBuilder(ConeType cone, Index dim, Index nvars) : cone_(cone), dim_(dim), nvars_(nvars) {
  const Index rows = cone == ConeType::Psd ? svec_length(dim) : dim;
  offset_ = Vector::Zero(rows);
}

void BlockBuilder::add(Index row, Index var, double value) {
  if (row < 0 || row >= offset_.size() || var < 0 || var >= nvars_) throw DimensionError("BlockBuilder: index out of range");
  if (value != 0.0) triplets_.emplace_back(row, var, value);
}

void BlockBuilder::add_offset(Index row, double value) {
  if (row < 0 || row >= offset_.size()) throw DimensionError("BlockBuilder: row out of range");
  offset_[row] += value;
}

ConeBlock BlockBuilder::finish() const {
  ConeBlock b;
  b.cone = cone_;
  b.dim = dim_;
  b.map = SparseMatrix(offset_.size(), nvars_);
  b.map.setFromTriplets(triplets_.begin(), triplets_.end());
  b.offset = offset_;
  return b;
}

std::vector<std::string> validate(const ConicProgram& prog) {
  std::vector<std::string> diags;
  if (prog.nvars < 0) diags.push_back("negative variable count");
  if (prog.objective.size() != prog.nvars) {
    diags.push_back("objective has length " + std::to_string(prog.objective.size()) + ", expected " + std::to_string(prog.nvars));
  } else if (!prog.objective.allFinite()) {
    diags.push_back("objective contains a non-finite coefficient");
  }
  if (!std::isfinite(prog.constant)) diags.push_back("objective constant is not finite");
  for (std::size_t k = 0; k < prog.blocks.size(); ++k) {
    const auto& b = prog.blocks[k];
    const std::string tag = "block " + std::to_string(k) + " (" + to_string(b.cone) + "): ";
    if ((b.cone == ConeType::Soc || b.cone == ConeType::RotatedSoc) && b.dim < 2) {
      diags.push_back(tag + "cone dimension " + std::to_string(b.dim) + " < 2");
      continue;
    }
    if (b.dim < 1) {
      diags.push_back(tag + "empty block");
      continue;
    }
    if (b.map.cols() != prog.nvars) {
      diags.push_back(tag + "map has " + std::to_string(b.map.cols()) + " columns, expected " + std::to_string(prog.nvars));
    }
    if (b.map.rows() != b.rows() || b.offset.size() != b.rows()) {
      diags.push_back(tag + "expected " + std::to_string(b.rows()) + " rows, map has " + std::to_string(b.map.rows()) +
                      " and offset has " + std::to_string(b.offset.size()));
      continue;
    }
    if (!sparse_finite(b.map) || !b.offset.allFinite()) diags.push_back(tag + "non-finite coefficient");
    if (b.cone == ConeType::Psd && b.layout == PsdLayout::Full) {
      const Index n = b.dim;
      const Matrix dense = Matrix(b.map);
      bool symmetric = true;
      for (Index i = 0; i < n && symmetric; ++i) {
        for (Index j = i + 1; j < n && symmetric; ++j) {
          const Index rij = j * n + i;
          const Index rji = i * n + j;
          if ((dense.row(rij) - dense.row(rji)).cwiseAbs().maxCoeff() > 1e-12 || std::abs(b.offset[rij] - b.offset[rji]) > 1e-12) {
            symmetric = false;
          }
        }
      }
      if (!symmetric) diags.push_back(tag + "affine map yields an asymmetric matrix");
    }
  }
  return diags;
}

ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings) {
  const auto diags = validate(prog);
  if (!diags.empty()) {
    std::string msg = "invalid conic program:";
    for (const auto& d : diags) msg += "\n  " + d;
    throw ValidationError(msg);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const detail::StandardForm form = standard_form(prog);
  const detail::IpmResult r = detail::interior_point(form, settings);
  ConicSolution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  if (r.status == SolveStatus::Optimal || r.status == SolveStatus::NumericalLimit || r.status == SolveStatus::IterationLimit) {
    sol.primal = r.x;
    sol.objective = prog.value(r.x);
  } else {
    sol.objective = r.status == SolveStatus::Infeasible ? std::numeric_limits<double>::infinity()
                                                        : -std::numeric_limits<double>::infinity();
  }
  sol.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

SolverSettings settings_from_env(SolverSettings base) {
  if (const char* env = std::getenv("SEQBMI_CONIC_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0.0) base.tol = v;
  }
  return base;
}

double cone_violation(ConeType cone, Index dim, const Vector& v) {
  switch (cone) {
    case ConeType::Zero: return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    case ConeType::Nonneg: return v.size() ? std::max(0.0, -v.minCoeff()) : 0.0;
    case ConeType::Soc: return std::max(0.0, v.tail(v.size() - 1).norm() - v[0]);
    case ConeType::RotatedSoc: {
      const double a = (v[0] + v[1]) / kSqrt2;
      const double b = (v[0] - v[1]) / kSqrt2;
      const double rest = v.size() > 2 ? v.tail(v.size() - 2).squaredNorm() : 0.0;
      return std::max(0.0, std::sqrt(b * b + rest) - a);
    }
    case ConeType::Psd: {
      Matrix m(dim, dim);
      if (v.size() == svec_length(dim)) {
        m = smat(SymVec(v)).dense();
      } else {
        m = Eigen::Map<const Matrix>(v.data(), dim, dim);
        m = 0.5 * (m + m.transpose()).eval();
      }
      Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
      return std::max(0.0, -es.eigenvalues()[0]);
    }
  }
  return 0.0;
}

double block_violation(const ConeBlock& block, const Vector& z) {
  return cone_violation(block.cone, block.dim, block.image(z));
}

double max_violation(const ConicProgram& prog, const Vector& z) {
  double worst = 0.0;
  for (const auto& b : prog.blocks) worst = std::max(worst, block_violation(b, z));
  return worst;
}

}  // namespace seqbmi
