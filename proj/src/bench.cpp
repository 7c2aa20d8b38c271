#include "seqbmi/bench.hpp"

#include "seqbmi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <ostream>

namespace seqbmi {

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? csv_number(*v) : ""; }
std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

// Opens `path` for writing, or returns `fallback` when path is empty.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

}  // namespace

std::vector<double> default_eta_grid() {
  std::vector<double> out;
  for (int i = -2; i <= 4; ++i) {
    for (const double m : {1.0, 2.0, 5.0}) out.push_back(m * std::pow(10.0, i));
  }
  return out;
}

double default_prog_thresh(NormKind kind) { return kind == NormKind::H2 ? 0.1 : 0.05; }

ControllerStructure parse_structure(const std::string& spec, const Plant& p) {
  if (spec == "centralized") return ControllerStructure::centralized(p.nu(), p.ny());
  if (spec == "diagonal") return ControllerStructure::diagonal(p.nu(), p.ny());
  std::ifstream in(spec);
  if (!in) throw ValidationError("structure '" + spec + "' is neither centralized, diagonal nor a readable mask file");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ValidationError("mask file '" + spec + "': parse error: " + e.what());
  }
  const Matrix mask = matrix_from_json(j, "mask");
  if (mask.rows() != p.nu() || mask.cols() != p.ny()) {
    throw DimensionError("mask is " + std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) + ", expected " +
                         std::to_string(p.nu()) + "x" + std::to_string(p.ny()));
  }
  return ControllerStructure::from_mask(mask);
}

bool bound_certifies(double bound, double norm) {
  if (!std::isfinite(norm)) return false;
  return bound >= norm - 1e-4 * std::abs(norm) - 1e-6;
}

RunSummary run_synthesis(const Plant& plant, const ControllerStructure& s, const RunOptions& opt) {
  RunSummary out;
  out.problem = build_synthesis(opt.kind, plant, s, opt.eta, opt.scaling);
  SequentialConfig cfg;
  cfg.eta = opt.eta;
  cfg.cone = opt.cone;
  cfg.prog_thresh = opt.prog_thresh.value_or(default_prog_thresh(opt.kind));
  cfg.max_round = opt.max_round;
  cfg.accelerate = opt.accelerate;
  cfg.anchor0 = opt.anchor;
  try {
    out.result = run(out.problem.bmi, cfg);
  } catch (const RoundFailure& f) {
    out.result.trace = f.trace;
    out.status = "solver_failure";
    out.message = f.what();
    if (f.trace.rounds.empty()) return out;
    out.result.x = f.trace.rounds.back().x;
  }
  out.controller = extract_controller(out.result.x, out.problem);
  out.lift_feasible = out.result.trace.rounds.back().lift_residual <= cfg.feas_tol;
  out.certified = out.lift_feasible && out.controller.stabilizing && bound_certifies(out.controller.bound, out.controller.norm);
  if (out.status.empty()) {
    if (!out.lift_feasible) out.status = "not_feasible";
    else if (!out.controller.stabilizing) out.status = "not_stabilizing";
    else out.status = "ok";
  }
  return out;
}

std::vector<double> log_space(double lo, double hi, int steps) {
  if (steps < 1 || !(lo > 0.0) || !(hi >= lo)) throw ValidationError("log_space: need steps >= 1 and 0 < lo <= hi");
  std::vector<double> out;
  if (steps == 1) return {lo};
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < steps; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (steps - 1)));
  return out;
}

std::vector<SweepPoint> eta_sweep(const Plant& plant, NormKind kind, const ControllerStructure& s,
                                  const std::vector<ConeKind>& cones, const std::vector<double>& etas) {
  std::vector<SweepPoint> out;
  const SolverSettings settings = settings_from_env();
  for (const ConeKind cone : cones) {
    for (const double eta : etas) {
      SweepPoint pt;
      pt.cone = cone;
      pt.eta = eta;
      const SynthesisProblem sp = build_synthesis(kind, plant, s, eta);
      const Index n = sp.bmi.num_vars();
      const ConicProgram prog = build_penalized(sp.bmi, cone, PenaltyConfig{eta, Vector::Zero(n)});
      const ConicSolution sol = solve(prog, settings);
      pt.status = to_string(sol.status);
      if (sol.has_primal()) {
        const LiftedPoint lp = split_lifted(sol.primal, n);
        pt.lift_residual = lift_residual(lp.x, lp.lifted);
        pt.objective = sp.bmi.objective().dot(lp.x);
      } else {
        pt.lift_residual = std::numeric_limits<double>::quiet_NaN();
        pt.objective = std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(pt);
    }
  }
  return out;
}

void write_bench_header(std::ostream& out) {
  out << "name,open_loop_norm,eta,t_avg_seconds,k_f,obj_f,k_p,obj_p,cone,status\r\n";
}

void write_bench_row(std::ostream& out, const BenchRow& r) {
  out << csv_field(r.name) << ',' << csv_number(r.open_loop_norm) << ',' << opt_number(r.eta) << ','
      << csv_number(r.t_avg_seconds) << ',' << opt_int(r.k_f) << ',' << opt_number(r.obj_f) << ',' << opt_int(r.k_p) << ','
      << opt_number(r.obj_p) << ',' << to_string(r.cone) << ',' << csv_field(r.status) << "\r\n";
}

int cmd_solve(const SolveCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const Plant plant = load_plant(cmd.plant);
    const ControllerStructure s = parse_structure(cmd.structure, plant);
    const RunSummary r = run_synthesis(plant, s, cmd.run);
    const SolveTrace& t = r.result.trace;
    Json j;
    j["plant"] = plant.name;
    j["kind"] = to_string(cmd.run.kind);
    j["cone"] = to_string(cmd.run.cone);
    j["eta"] = cmd.run.eta;
    j["status"] = r.status;
    if (!r.message.empty()) j["message"] = r.message;
    if (!t.rounds.empty()) {
      j["controller"] = controller_to_json(r.controller, r.problem);
      j["K"] = matrix_to_json(r.controller.K);
      j["h"] = vector_to_json(r.controller.h);
      j[cmd.run.kind == NormKind::H2 ? "trW" : "gamma"] = json_number(r.controller.bound);
      j["stabilizing"] = r.controller.stabilizing;
      j["closed_loop_norm"] = json_number(r.controller.norm);
      j["certified"] = r.certified;
    }
    j["open_loop_norm"] = json_number(open_loop_norm(plant, cmd.run.kind));
    j["k_f"] = t.k_f ? Json(*t.k_f) : Json(nullptr);
    j["obj_f"] = t.k_f ? json_number(t.obj_f) : Json(nullptr);
    j["k_p"] = t.k_p;
    j["obj_p"] = t.rounds.empty() ? Json(nullptr) : json_number(t.obj_p);
    j["trace"] = trace_to_json(t);
    OutputTarget target(cmd.output, out);
    target.get() << j.dump(2) << "\n";
    if (!cmd.trace_csv.empty()) {
      OutputTarget csv(cmd.trace_csv, out);
      write_trace_csv(csv.get(), t);
    }
    if (r.status == "ok") return 0;
    err << "solve: " << r.status << (r.message.empty() ? "" : ": " + r.message) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "solve: " << e.what() << "\n";
    return 1;
  }
}

int cmd_bench(const BenchCommand& cmd, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  try {
    for (const auto& entry : fs::directory_iterator(cmd.dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path().string());
    }
  } catch (const fs::filesystem_error& e) {
    err << "bench: " << e.what() << "\n";
    return 1;
  }
  std::sort(files.begin(), files.end());

  std::vector<BenchRow> rows(files.size());
  std::vector<std::vector<BenchLogRow>> logs(files.size());
  std::mutex err_mutex;

#pragma omp parallel for schedule(dynamic, 1)
  for (long long fi = 0; fi < static_cast<long long>(files.size()); ++fi) {
    const std::string& path = files[static_cast<std::size_t>(fi)];
    BenchRow& row = rows[static_cast<std::size_t>(fi)];
    row.name = fs::path(path).stem().string();
    row.cone = cmd.cone;
    Plant plant;
    try {
      plant = load_plant(path);
      row.name = plant.name;
      row.open_loop_norm = open_loop_norm(plant, cmd.kind);
    } catch (const std::exception& e) {
      row.status = "load_error";
      row.open_loop_norm = std::numeric_limits<double>::quiet_NaN();
      std::lock_guard<std::mutex> lock(err_mutex);
      err << "bench: " << path << ": " << e.what() << "\n";
      continue;
    }
    try {
      const ControllerStructure s = parse_structure(cmd.structure, plant);
      std::optional<std::size_t> best;
      for (const double eta : cmd.etas) {
        RunOptions opt;
        opt.kind = cmd.kind;
        opt.cone = cmd.cone;
        opt.eta = eta;
        opt.prog_thresh = cmd.prog_thresh;
        opt.max_round = cmd.max_round;
        opt.accelerate = cmd.accelerate;
        auto& log = logs[static_cast<std::size_t>(fi)];
        log.push_back({row.name, eta, run_synthesis(plant, s, opt)});
        const RunSummary& r = log.back().summary;
        if (r.status == "ok" && r.certified) {
          if (!best || r.result.trace.obj_p < logs[static_cast<std::size_t>(fi)][*best].summary.result.trace.obj_p) best = log.size() - 1;
        }
      }
      if (best) {
        const BenchLogRow& b = logs[static_cast<std::size_t>(fi)][*best];
        const SolveTrace& t = b.summary.result.trace;
        row.eta = b.eta;
        row.t_avg_seconds = t.mean_solve_time();
        row.k_f = t.k_f;
        if (t.k_f) row.obj_f = t.obj_f;
        row.k_p = t.k_p;
        row.obj_p = t.obj_p;
        row.status = "ok";
      } else {
        row.status = "no_feasible_eta";
      }
    } catch (const std::exception& e) {
      row.status = "error";
      std::lock_guard<std::mutex> lock(err_mutex);
      err << "bench: " << row.name << ": " << e.what() << "\n";
    }
  }

  try {
    OutputTarget target(cmd.output, out);
    write_bench_header(target.get());
    for (const auto& r : rows) write_bench_row(target.get(), r);
    if (!cmd.log.empty()) {
      OutputTarget log(cmd.log, out);
      log.get() << "name,eta,cone,status,k_f,obj_f,k_p,obj_p,t_avg_seconds,stabilizing,closed_loop_norm\r\n";
      for (const auto& plant_log : logs) {
        for (const auto& l : plant_log) {
          const SolveTrace& t = l.summary.result.trace;
          log.get() << csv_field(l.name) << ',' << csv_number(l.eta) << ',' << to_string(cmd.cone) << ',' << l.summary.status << ','
                    << opt_int(t.k_f) << ',' << (t.k_f ? csv_number(t.obj_f) : "") << ','
                    << (t.rounds.empty() ? "" : std::to_string(t.k_p)) << ',' << (t.rounds.empty() ? "" : csv_number(t.obj_p)) << ','
                    << csv_number(t.mean_solve_time()) << ',' << (l.summary.controller.stabilizing ? "true" : "false") << ','
                    << csv_number(l.summary.controller.norm) << "\r\n";
        }
      }
    }
  } catch (const std::exception& e) {
    err << "bench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_eta_sweep(const SweepCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const Plant plant = load_plant(cmd.plant);
    const ControllerStructure s = parse_structure(cmd.structure, plant);
    const auto points = eta_sweep(plant, cmd.kind, s, cmd.cones, log_space(cmd.eta_min, cmd.eta_max, cmd.steps));
    OutputTarget target(cmd.output, out);
    target.get() << "cone,eta,lift_residual,obj,status\r\n";
    for (const auto& p : points) {
      target.get() << to_string(p.cone) << ',' << csv_number(p.eta) << ',' << csv_number(p.lift_residual) << ','
                   << csv_number(p.objective) << ',' << p.status << "\r\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "eta-sweep: " << e.what() << "\n";
    return 1;
  }
}

int cmd_norm(const std::string& plant_path, NormKind kind, std::ostream& out, std::ostream& err) {
  try {
    const Plant plant = load_plant(plant_path);
    out << csv_number(open_loop_norm(plant, kind)) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "norm: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace seqbmi
