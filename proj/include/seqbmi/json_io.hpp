#pragma once

#include "seqbmi/bmi_problem.hpp"
#include "seqbmi/lti.hpp"
#include "seqbmi/sequential.hpp"
#include "seqbmi/synthesis.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace seqbmi {

using Json = nlohmann::json;

/// Row-major array of arrays. Throws DimensionError on ragged rows and
/// ValidationError on non-numeric entries; `what` names the field.
Matrix matrix_from_json(const Json& j, const std::string& what);
Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

/// Requires A, B1, B, C1, C, D11, D12, D21; "name" is optional and
/// defaults to `fallback_name`.
Plant plant_from_json(const Json& j, const std::string& fallback_name = "");
Json plant_to_json(const Plant& p);
/// Reads and validates a plant file; the name defaults to the file stem.
Plant load_plant(const std::string& path);

Json problem_to_json(const BmiProblem& prob);
BmiProblem problem_from_json(const Json& j);

Json round_to_json(const RoundRecord& r);
Json trace_to_json(const SolveTrace& t);

/// k,objective,penalty,lift_residual,bmi_residual,improvement,status,solve_time,iterations
void write_trace_csv(std::ostream& out, const SolveTrace& t);

Json controller_to_json(const ControllerResult& r, const SynthesisProblem& sp);

/// %.6g, with "Inf"/"-Inf"/"NaN" for non-finite values.
std::string csv_number(double v);
/// RFC-4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(const std::string& s);

/// JSON number, or the strings "Inf"/"-Inf"/"NaN".
Json json_number(double v);

}  // namespace seqbmi
