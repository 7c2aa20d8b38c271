#pragma once

#include "seqbmi/json_io.hpp"
#include "seqbmi/lti.hpp"
#include "seqbmi/relaxation.hpp"
#include "seqbmi/sequential.hpp"
#include "seqbmi/synthesis.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace seqbmi {

/// {1, 2, 5} × 10^i for i = -2..4.
std::vector<double> default_eta_grid();

/// 0.1 for H2, 0.05 for H∞ (percent).
double default_prog_thresh(NormKind kind);

/// "centralized", "diagonal", or a path to a JSON 0/1 mask (array of rows).
ControllerStructure parse_structure(const std::string& spec, const Plant& p);

struct RunOptions {
  NormKind kind = NormKind::H2;
  ConeKind cone = ConeKind::Parabolic;
  double eta = 1.0;
  std::optional<double> prog_thresh;
  int max_round = 250;
  bool accelerate = true;
  /// Starting anchor in solver coordinates; empty means zero.
  Vector anchor;
  Scaling scaling = Scaling::Standard;
};

struct RunSummary {
  SynthesisProblem problem;
  SequentialResult result;
  ControllerResult controller;
  /// Final iterate has lift residual <= feas_tol.
  bool lift_feasible = false;
  /// Stabilizing, lift-feasible and the bound dominates the closed-loop norm.
  bool certified = false;
  /// "ok", "not_feasible", "not_stabilizing" or "solver_failure".
  std::string status;
  std::string message;
};

/// build → sequential run → controller extraction. Solver failures are
/// reported through `status`; precondition errors throw.
RunSummary run_synthesis(const Plant& plant, const ControllerStructure& s, const RunOptions& opt);

/// Whether bound >= norm within the soundness tolerance.
bool bound_certifies(double bound, double norm);

struct SweepPoint {
  ConeKind cone = ConeKind::Parabolic;
  double eta = 0.0;
  double lift_residual = 0.0;
  double objective = 0.0;
  std::string status;
};

/// One penalized round from the zero anchor at each (cone, η).
std::vector<SweepPoint> eta_sweep(const Plant& plant, NormKind kind, const ControllerStructure& s,
                                  const std::vector<ConeKind>& cones, const std::vector<double>& etas);

/// `steps` log-spaced values from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, int steps);

struct BenchRow {
  std::string name;
  double open_loop_norm = 0.0;
  std::optional<double> eta;
  double t_avg_seconds = 0.0;
  std::optional<int> k_f;
  std::optional<double> obj_f;
  std::optional<int> k_p;
  std::optional<double> obj_p;
  ConeKind cone = ConeKind::Parabolic;
  std::string status;
};

struct BenchLogRow {
  std::string name;
  double eta = 0.0;
  RunSummary summary;
};

/// name,open_loop_norm,eta,t_avg_seconds,k_f,obj_f,k_p,obj_p,cone,status
void write_bench_header(std::ostream& out);
void write_bench_row(std::ostream& out, const BenchRow& row);

struct SolveCommand {
  std::string plant;
  std::string structure = "centralized";
  RunOptions run;
  std::string output;  // empty: stdout
  std::string trace_csv;
};

struct BenchCommand {
  std::string dir;
  std::string structure = "centralized";
  NormKind kind = NormKind::H2;
  ConeKind cone = ConeKind::Parabolic;
  std::vector<double> etas = default_eta_grid();
  std::optional<double> prog_thresh;
  int max_round = 250;
  bool accelerate = true;
  std::string output;  // empty: stdout
  std::string log;     // per-η log CSV, optional
};

struct SweepCommand {
  std::string plant;
  std::string structure = "centralized";
  NormKind kind = NormKind::H2;
  std::vector<ConeKind> cones = {ConeKind::Sdp, ConeKind::Socp, ConeKind::Parabolic};
  double eta_min = 1e-2;
  double eta_max = 1e4;
  int steps = 25;
  std::string output;
};

/// Each returns the process exit code: 0 success, 2 non-feasible termination
/// (solve only), 1 error. Diagnostics go to `err`.
int cmd_solve(const SolveCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_eta_sweep(const SweepCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_norm(const std::string& plant, NormKind kind, std::ostream& out, std::ostream& err);

}  // namespace seqbmi
