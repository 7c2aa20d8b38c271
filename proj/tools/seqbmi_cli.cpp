#include "seqbmi/bench.hpp"
#include "seqbmi/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace seqbmi;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential penalized relaxations for BMI problems and static output-feedback synthesis"};
  app.require_subcommand(1);

  // solve
  SolveCommand sc;
  std::string solve_kind = "h2";
  std::string solve_cone = "parabolic";
  double prog_thresh = -1.0;
  double anchor_fill = 0.0;
  bool no_accel = false;
  auto* solve = app.add_subcommand("solve", "Design a controller for one plant");
  solve->add_option("plant", sc.plant, "Plant JSON file")->required();
  solve->add_option("--kind", solve_kind, "h2 or hinf")->capture_default_str();
  solve->add_option("--structure", sc.structure, "centralized, diagonal or a mask JSON file")->capture_default_str();
  solve->add_option("--cone", solve_cone, "sdp, socp or parabolic")->capture_default_str();
  solve->add_option("--eta", sc.run.eta, "Penalty weight")->required();
  solve->add_option("--prog-thresh", prog_thresh, "Stopping threshold in percent (default 0.1 h2, 0.05 hinf)");
  solve->add_option("--max-round", sc.run.max_round, "Round limit")->capture_default_str();
  solve->add_flag("--no-accel", no_accel, "Disable the extrapolated anchor update");
  solve->add_option("--anchor", anchor_fill, "Fill value of the starting anchor (solver coordinates)")->capture_default_str();
  solve->add_option("-o,--output", sc.output, "Result JSON file (default stdout)");
  solve->add_option("--trace-csv", sc.trace_csv, "Per-round CSV file");

  // bench
  BenchCommand bc;
  std::string bench_kind = "h2";
  std::string bench_cone = "parabolic";
  std::string eta_list;
  double bench_thresh = -1.0;
  bool bench_no_accel = false;
  auto* bench = app.add_subcommand("bench", "Run the eta grid on every plant of a directory");
  bench->add_option("dir", bc.dir, "Directory of plant JSON files")->required();
  bench->add_option("--kind", bench_kind, "h2 or hinf")->capture_default_str();
  bench->add_option("--structure", bc.structure, "centralized, diagonal or a mask JSON file")->capture_default_str();
  bench->add_option("--cone", bench_cone, "sdp, socp or parabolic")->capture_default_str();
  bench->add_option("--etas", eta_list, "Comma-separated eta values (default {1,2,5}e-2..e4)");
  bench->add_option("--prog-thresh", bench_thresh, "Stopping threshold in percent");
  bench->add_option("--max-round", bc.max_round, "Round limit")->capture_default_str();
  bench->add_flag("--no-accel", bench_no_accel, "Disable the extrapolated anchor update");
  bench->add_option("-o,--output", bc.output, "CSV file (default stdout)");
  bench->add_option("--log", bc.log, "Per-eta CSV log");

  // eta-sweep
  SweepCommand wc;
  std::string sweep_kind = "h2";
  std::string sweep_cones = "sdp,socp,parabolic";
  auto* sweep = app.add_subcommand("eta-sweep", "Single-round lift residual versus eta");
  sweep->add_option("plant", wc.plant, "Plant JSON file")->required();
  sweep->add_option("--kind", sweep_kind, "h2 or hinf")->capture_default_str();
  sweep->add_option("--structure", wc.structure, "centralized, diagonal or a mask JSON file")->capture_default_str();
  sweep->add_option("--cones", sweep_cones, "Comma-separated cones")->capture_default_str();
  sweep->add_option("--eta-min", wc.eta_min)->capture_default_str();
  sweep->add_option("--eta-max", wc.eta_max)->capture_default_str();
  sweep->add_option("--steps", wc.steps)->capture_default_str();
  sweep->add_option("-o,--output", wc.output, "CSV file (default stdout)");

  // norm
  std::string norm_plant;
  std::string norm_kind = "h2";
  auto* norm = app.add_subcommand("norm", "Open-loop norm of a plant");
  norm->add_option("plant", norm_plant, "Plant JSON file")->required();
  norm->add_option("--kind", norm_kind, "h2 or hinf")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*solve) {
      sc.run.kind = parse_norm_kind(solve_kind);
      sc.run.cone = parse_cone_kind(solve_cone);
      if (prog_thresh >= 0.0) sc.run.prog_thresh = prog_thresh;
      sc.run.accelerate = !no_accel;
      if (anchor_fill != 0.0) {
        const Plant p = load_plant(sc.plant);
        const SynthesisProblem sp = build_synthesis(sc.run.kind, p, parse_structure(sc.structure, p), sc.run.eta);
        sc.run.anchor = Vector::Constant(sp.bmi.num_vars(), anchor_fill);
      }
      return cmd_solve(sc, std::cout, std::cerr);
    }
    if (*bench) {
      bc.kind = parse_norm_kind(bench_kind);
      bc.cone = parse_cone_kind(bench_cone);
      if (!eta_list.empty()) bc.etas = parse_list(eta_list);
      if (bench_thresh >= 0.0) bc.prog_thresh = bench_thresh;
      bc.accelerate = !bench_no_accel;
      return cmd_bench(bc, std::cout, std::cerr);
    }
    if (*sweep) {
      wc.kind = parse_norm_kind(sweep_kind);
      wc.cones.clear();
      std::stringstream ss(sweep_cones);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) wc.cones.push_back(parse_cone_kind(item));
      }
      return cmd_eta_sweep(wc, std::cout, std::cerr);
    }
    if (*norm) return cmd_norm(norm_plant, parse_norm_kind(norm_kind), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "seqbmi: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
