#include "seqbmi/sequential.hpp"

#include "seqbmi/errors.hpp"

#include <chrono>
#include <cmath>

namespace seqbmi {

void SequentialConfig::check(Index n) const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("sequential: eta must be positive");
  if (max_round < 1) throw ValidationError("sequential: max_round must be >= 1");
  if (!(feas_tol > 0.0)) throw ValidationError("sequential: feas_tol must be positive");
  if (!std::isfinite(prog_thresh) || prog_thresh < 0.0) throw ValidationError("sequential: prog_thresh must be >= 0");
  if (anchor0.size() != 0 && anchor0.size() != n) throw DimensionError("sequential: anchor0 has wrong length");
  if (anchor0.size() != 0 && !anchor0.allFinite()) throw ValidationError("sequential: anchor0 is not finite");
}

const char* to_string(Termination t) {
  return t == Termination::Converged ? "converged" : "max_round";
}

double SolveTrace::mean_solve_time() const {
  if (rounds.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : rounds) total += r.solve_time;
  return total / static_cast<double>(rounds.size());
}

Vector nesterov_anchor(const Vector& x_k, const Vector& x_prev, int k) {
  if (k < 1) throw ValidationError("nesterov_anchor: k must be >= 1");
  if (x_k.size() != x_prev.size()) throw DimensionError("nesterov_anchor: size mismatch");
  const double beta = static_cast<double>(k - 1) / static_cast<double>(k + 2);
  return x_k + beta * (x_k - x_prev);
}

double stopping_improvement(const Vector& x_k, const Vector& x_prev, const Vector& c) {
  if (x_k.size() != x_prev.size() || c.size() != x_k.size()) throw DimensionError("stopping_improvement: size mismatch");
  const double delta = std::abs(c.dot(x_k - x_prev));
  const double base = std::abs(c.dot(x_prev));
  return base == 0.0 ? 100.0 * delta : 100.0 * delta / base;
}

SequentialResult run(const BmiProblem& prob, const SequentialConfig& cfg) {
  const Index n = prob.num_vars();
  cfg.check(n);
  const Vector& c = prob.objective();

  SolveTrace trace;
  PenaltyConfig pen;
  pen.eta = cfg.eta;
  pen.anchor = cfg.anchor0.size() ? cfg.anchor0 : Vector::Zero(n);
  Vector x_prev = pen.anchor;

  for (int k = 1; k <= cfg.max_round; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const ConicProgram prog = build_penalized(prob, cfg.cone, pen);
    const ConicSolution sol = solve(prog, cfg.conic);

    if (!sol.has_primal()) {
      throw RoundFailure("round " + std::to_string(k) + ": conic solver reported " + to_string(sol.status), trace, sol.status);
    }
    if (sol.status != SolveStatus::Optimal) {
      const double viol = max_violation(prog, sol.primal);
      if (!(viol <= cfg.block_tol)) {
        throw RoundFailure("round " + std::to_string(k) + ": conic solver reported " + to_string(sol.status) +
                               " with block violation " + std::to_string(viol),
                           trace, sol.status);
      }
    }

    const LiftedPoint pt = split_lifted(sol.primal, n);
    RoundRecord rec;
    rec.k = k;
    rec.x = pt.x;
    rec.objective = c.dot(pt.x);
    rec.penalty = penalty_value(pt.x, pt.lifted, pen);
    rec.lift_residual = lift_residual(pt.x, pt.lifted);
    rec.bmi_residual = bmi_residual(prob, pt.x);
    rec.improvement = stopping_improvement(pt.x, x_prev, c);
    rec.status = sol.status;
    rec.solve_time = sol.solve_time;
    rec.iterations = sol.iterations;
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.rounds.push_back(rec);

    if (!trace.k_f && rec.lift_residual <= cfg.feas_tol) {
      trace.k_f = k;
      trace.obj_f = rec.objective;
    }
    trace.k_p = k;
    trace.obj_p = rec.objective;

    if (k >= 2 && rec.improvement <= cfg.prog_thresh) {
      trace.termination = Termination::Converged;
      break;
    }
    pen.anchor = cfg.accelerate ? nesterov_anchor(pt.x, x_prev, k) : pt.x;
    x_prev = pt.x;
  }
  return {trace.rounds.back().x, std::move(trace)};
}

}  // namespace seqbmi
