#pragma once

#include "seqbmi/bmi_problem.hpp"
#include "seqbmi/conic.hpp"
#include "seqbmi/relaxation.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqbmi {

struct SequentialConfig {
  double eta = 1.0;
  ConeKind cone = ConeKind::Parabolic;
  /// Percent relative improvement below which the loop stops.
  double prog_thresh = 0.1;
  int max_round = 250;
  bool accelerate = true;
  double feas_tol = 1e-5;
  /// Starting anchor; empty means zero.
  Vector anchor0;
  /// Block feasibility required to keep going after a non-optimal solve.
  double block_tol = 1e-6;
  SolverSettings conic = settings_from_env();

  /// Throws ValidationError on eta <= 0, max_round < 1, feas_tol <= 0 or an
  /// anchor of the wrong length.
  void check(Index n) const;
};

struct RoundRecord {
  int k = 0;
  Vector x;
  double objective = 0.0;  // cᵀx_k
  double penalty = 0.0;
  double lift_residual = 0.0;
  double bmi_residual = 0.0;
  /// Percent improvement against the previous round (round 1 compares with
  /// the starting anchor and never stops the loop).
  double improvement = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  double solve_time = 0.0;
  double wall_time = 0.0;
  int iterations = 0;
};

enum class Termination { Converged, MaxRound };

const char* to_string(Termination t);

struct SolveTrace {
  std::vector<RoundRecord> rounds;
  std::optional<int> k_f;
  double obj_f = 0.0;
  int k_p = 0;
  double obj_p = 0.0;
  Termination termination = Termination::MaxRound;

  /// Mean conic solve time over rounds.
  double mean_solve_time() const;
};

/// A round ended without a usable iterate. Carries the rounds completed so
/// far.
class RoundFailure : public std::runtime_error {
 public:
  RoundFailure(const std::string& what, SolveTrace partial, SolveStatus status)
      : std::runtime_error(what), trace(std::move(partial)), status(status) {}
  SolveTrace trace;
  SolveStatus status;
};

struct SequentialResult {
  Vector x;
  SolveTrace trace;
};

/// Repeatedly solves the penalized relaxation around an anchor that is
/// moved to (an extrapolation of) the latest iterate.
SequentialResult run(const BmiProblem& prob, const SequentialConfig& cfg);

/// x_k + ((k-1)/(k+2))(x_k - x_prev).
Vector nesterov_anchor(const Vector& x_k, const Vector& x_prev, int k);

/// 100·|cᵀ(x_k - x_prev)| / |cᵀx_prev|, or 100·|cᵀ(x_k - x_prev)| when
/// cᵀx_prev = 0.
double stopping_improvement(const Vector& x_k, const Vector& x_prev, const Vector& c);

}  // namespace seqbmi
