#include "seqbmi/json_io.hpp"

#include "seqbmi/errors.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace seqbmi {

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw ValidationError(what + ": expected an array of rows");
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) throw ValidationError(what + ": row " + std::to_string(r) + " is not an array");
    if (static_cast<Index>(row.size()) != cols) {
      throw DimensionError(what + ": row " + std::to_string(r) + " has " + std::to_string(row.size()) + " columns, row 0 has " + std::to_string(cols));
    }
    for (Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ValidationError(what + ": entry (" + std::to_string(r) + "," + std::to_string(c) + ") is not a number");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(json_number(v[i]));
  return out;
}

Plant plant_from_json(const Json& j, const std::string& fallback_name) {
  if (!j.is_object()) throw ValidationError("plant: expected a JSON object");
  auto field = [&](const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("plant: missing field '") + key + "'");
    return matrix_from_json(j.at(key), key);
  };
  Plant p;
  p.name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : fallback_name;
  p.A = field("A");
  p.B1 = field("B1");
  p.B = field("B");
  p.C1 = field("C1");
  p.C = field("C");
  p.D11 = field("D11");
  p.D12 = field("D12");
  p.D21 = field("D21");
  p.check();
  return p;
}

Json plant_to_json(const Plant& p) {
  return Json{{"name", p.name},
              {"A", matrix_to_json(p.A)},
              {"B1", matrix_to_json(p.B1)},
              {"B", matrix_to_json(p.B)},
              {"C1", matrix_to_json(p.C1)},
              {"C", matrix_to_json(p.C)},
              {"D11", matrix_to_json(p.D11)},
              {"D12", matrix_to_json(p.D12)},
              {"D21", matrix_to_json(p.D21)}};
}

Plant load_plant(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plant file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ValidationError("plant file '" + path + "': parse error: " + e.what());
  }
  return plant_from_json(j, std::filesystem::path(path).stem().string());
}

Json problem_to_json(const BmiProblem& prob) {
  Json lin = Json::array();
  for (const auto& t : prob.linear()) lin.push_back({{"var", t.var}, {"coeff", matrix_to_json(t.coeff.dense())}});
  Json bil = Json::array();
  for (const auto& t : prob.bilinear()) bil.push_back({{"i", t.i}, {"j", t.j}, {"coeff", matrix_to_json(t.coeff.dense())}});
  return Json{{"objective", vector_to_json(prob.objective())},
              {"F0", matrix_to_json(prob.constant().dense())},
              {"linear", lin},
              {"bilinear", bil}};
}

BmiProblem problem_from_json(const Json& j) {
  const auto& c = j.at("objective");
  Vector obj(static_cast<Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) obj[static_cast<Index>(i)] = c[i].get<double>();
  SymMatrix f0 = SymMatrix::symmetrize(matrix_from_json(j.at("F0"), "F0"));
  std::vector<LinearTerm> lin;
  for (const auto& t : j.value("linear", Json::array())) {
    lin.push_back({t.at("var").get<Index>(), SymMatrix::symmetrize(matrix_from_json(t.at("coeff"), "linear coeff"))});
  }
  std::vector<BilinearTerm> bil;
  for (const auto& t : j.value("bilinear", Json::array())) {
    bil.push_back({t.at("i").get<Index>(), t.at("j").get<Index>(), SymMatrix::symmetrize(matrix_from_json(t.at("coeff"), "bilinear coeff"))});
  }
  return BmiProblem(std::move(obj), std::move(f0), std::move(lin), std::move(bil));
}

Json json_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  return v;
}

Json round_to_json(const RoundRecord& r) {
  return Json{{"k", r.k},
              {"x", vector_to_json(r.x)},
              {"objective", json_number(r.objective)},
              {"penalty", json_number(r.penalty)},
              {"lift_residual", json_number(r.lift_residual)},
              {"bmi_residual", json_number(r.bmi_residual)},
              {"improvement", json_number(r.improvement)},
              {"status", to_string(r.status)},
              {"solve_time", r.solve_time},
              {"wall_time", r.wall_time},
              {"iterations", r.iterations}};
}

Json trace_to_json(const SolveTrace& t) {
  Json rounds = Json::array();
  for (const auto& r : t.rounds) rounds.push_back(round_to_json(r));
  return Json{{"rounds", rounds},
              {"k_f", t.k_f ? Json(*t.k_f) : Json(nullptr)},
              {"obj_f", t.k_f ? json_number(t.obj_f) : Json(nullptr)},
              {"k_p", t.k_p},
              {"obj_p", json_number(t.obj_p)},
              {"termination", to_string(t.termination)}};
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_trace_csv(std::ostream& out, const SolveTrace& t) {
  out << "k,objective,penalty,lift_residual,bmi_residual,improvement,status,solve_time,iterations\r\n";
  for (const auto& r : t.rounds) {
    out << r.k << ',' << csv_number(r.objective) << ',' << csv_number(r.penalty) << ',' << csv_number(r.lift_residual) << ','
        << csv_number(r.bmi_residual) << ',' << csv_number(r.improvement) << ',' << to_string(r.status) << ','
        << csv_number(r.solve_time) << ',' << r.iterations << "\r\n";
  }
}

Json controller_to_json(const ControllerResult& r, const SynthesisProblem& sp) {
  Json labels = Json::array();
  for (Index q = 0; q < sp.structure.size(); ++q) {
    const Matrix& e = sp.structure.basis()[static_cast<std::size_t>(q)];
    Json support = Json::array();
    for (Index i = 0; i < e.rows(); ++i) {
      for (Index j = 0; j < e.cols(); ++j) {
        if (e(i, j) != 0.0) support.push_back({i, j});
      }
    }
    labels.push_back({{"name", sp.varmap.names[static_cast<std::size_t>(sp.h_offset + q)]}, {"support", support}});
  }
  return Json{{"K", matrix_to_json(r.K)},
              {"h", vector_to_json(r.h)},
              {"structure", labels},
              {"certificate",
               {{"max_real_eig", json_number(r.max_real_eig)},
                {"stabilizing", r.stabilizing},
                {"norm_kind", to_string(sp.kind)},
                {"closed_loop_norm", json_number(r.norm)},
                {"bound", json_number(r.bound)}}}};
}

}  // namespace seqbmi
