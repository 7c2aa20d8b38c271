#pragma once

#include "seqbmi/sym_linalg.hpp"

#include <Eigen/SparseCore>

#include <iosfwd>
#include <string>
#include <vector>

namespace seqbmi {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// ZERO: v = 0.  NONNEG: v >= 0.  SOC: v0 >= ‖v[1:]‖.
/// ROTATED_SOC: 2 v0 v1 >= ‖v[2:]‖², v0, v1 >= 0.
/// PSD: the svec-encoded matrix is positive semidefinite.
enum class ConeType { Zero, Nonneg, Soc, RotatedSoc, Psd };

const char* to_string(ConeType cone);

/// Image layout of a PSD block: svec (row-major upper triangle, unscaled
/// off-diagonals) or the full column-major n² vectorization.
enum class PsdLayout { Svec, Full };

/// One cone constraint  map·z + offset ∈ cone.  For PSD blocks `dim` is the
/// matrix side.
struct ConeBlock {
  ConeType cone = ConeType::Nonneg;
  Index dim = 0;
  SparseMatrix map;
  Vector offset;
  PsdLayout layout = PsdLayout::Svec;

  Index rows() const {
    if (cone != ConeType::Psd) return dim;
    return layout == PsdLayout::Svec ? svec_length(dim) : dim * dim;
  }
  Vector image(const Vector& z) const { return map * z + offset; }
};

/// minimize objectiveᵀz + constant over blocks.
struct ConicProgram {
  Index nvars = 0;
  Vector objective;
  double constant = 0.0;
  std::vector<ConeBlock> blocks;

  double value(const Vector& z) const { return objective.dot(z) + constant; }
};

/// Incremental construction of one ConeBlock.
class BlockBuilder {
 public:
  BlockBuilder(ConeType cone, Index dim, Index nvars);
  void add(Index row, Index var, double value);
  void add_offset(Index row, double value);
  /// Row of matrix entry (i, j) inside a PSD block.
  Index psd_row(Index i, Index j) const { return svec_index(dim_, i, j); }
  ConeBlock finish() const;

 private:
  ConeType cone_;
  Index dim_;
  Index nvars_;
  std::vector<Eigen::Triplet<double>> triplets_;
  Vector offset_;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalLimit, IterationLimit };

const char* to_string(SolveStatus status);

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 200;
};

/// `primal` is empty unless status is Optimal, NumericalLimit or
/// IterationLimit. `objective` includes the program constant.
struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalLimit;
  Vector primal;
  double objective = 0.0;
  double solve_time = 0.0;
  int iterations = 0;

  bool has_primal() const { return primal.size() > 0; }
};

/// Human-readable problems with `prog`; empty iff well formed.
std::vector<std::string> validate(const ConicProgram& prog);

/// Solves with the bundled homogeneous self-dual interior-point method.
/// Non-optimal outcomes are reported through `status`; a malformed program
/// throws ValidationError before any iteration.
ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings = {});

/// Reads SEQBMI_CONIC_TOL (if set and parseable) over `base.tol`.
SolverSettings settings_from_env(SolverSettings base = {});

/// Distance-like violation of `v` for a cone: 0 when inside, otherwise the
/// amount by which the defining inequality fails (λ_min for PSD, etc.).
double cone_violation(ConeType cone, Index dim, const Vector& v);

double block_violation(const ConeBlock& block, const Vector& z);

/// Largest block_violation over all blocks.
double max_violation(const ConicProgram& prog, const Vector& z);

/// Writes `prog` in Conic Benchmark Format (CBF) version 3. PSD blocks become
/// PSDCON entries, rotated SOC becomes QR. Coefficients are printed with
/// %.17g, entries in row order, so output is byte-stable.
void write_cbf(std::ostream& out, const ConicProgram& prog);

}  // namespace seqbmi
