#include "seqbmi/relaxation.hpp"

#include "seqbmi/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace seqbmi {

namespace {

// u·v ≥ w²/2 in the form (u, 1/2, w) with u = Σ X-terms and w = Σ x-terms.
struct Quad {
  std::vector<std::pair<Index, double>> u;
  std::vector<std::pair<Index, double>> w;
};

ConeBlock rsoc_block(const Quad& q, Index nvars) {
  BlockBuilder b(ConeType::RotatedSoc, 3, nvars);
  for (const auto& [var, val] : q.u) b.add(0, var, val);
  b.add_offset(1, 0.5);
  for (const auto& [var, val] : q.w) b.add(2, var, val);
  return b.finish();
}

}  // namespace

const char* to_string(ConeKind cone) {
  switch (cone) {
    case ConeKind::Sdp: return "sdp";
    case ConeKind::Socp: return "socp";
    case ConeKind::Parabolic: return "parabolic";
  }
  return "?";
}

ConeKind parse_cone_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "sdp") return ConeKind::Sdp;
  if (s == "socp") return ConeKind::Socp;
  if (s == "parabolic") return ConeKind::Parabolic;
  throw ValidationError("unknown cone '" + name + "' (expected sdp, socp or parabolic)");
}

void PenaltyConfig::check(Index n) const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("penalty: eta must be positive and finite");
  if (anchor.size() != n) throw DimensionError("penalty: anchor has length " + std::to_string(anchor.size()) + ", expected " + std::to_string(n));
  if (!anchor.allFinite()) throw ValidationError("penalty: anchor is not finite");
}

LiftedPoint split_lifted(const Vector& z, Index n) {
  const LiftLayout lay{n};
  if (z.size() != lay.nvars()) throw DimensionError("split_lifted: wrong vector length");
  return {z.head(n), smat(SymVec(z.tail(svec_length(n))))};
}

Vector join_lifted(const Vector& x, const SymMatrix& lifted) {
  if (lifted.dim() != x.size()) throw DimensionError("join_lifted: size mismatch");
  Vector z(x.size() + svec_length(x.size()));
  z << x, svec(lifted).data();
  return z;
}

std::vector<ConeBlock> encode_cone(ConeKind cone, Index n) {
  if (n < 1) throw DimensionError("encode_cone: n must be >= 1");
  const LiftLayout lay{n};
  const Index nv = lay.nvars();
  std::vector<ConeBlock> blocks;
  auto diag = [&](Index i) {
    Quad q;
    q.u = {{lay.lifted(i, i), 1.0}};
    q.w = {{lay.x(i), 1.0}};
    return rsoc_block(q, nv);
  };
  switch (cone) {
    case ConeKind::Sdp: {
      BlockBuilder b(ConeType::Psd, n + 1, nv);
      for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) b.add(b.psd_row(i, j), lay.lifted(i, j), 1.0);
        b.add(b.psd_row(i, n), lay.x(i), 1.0);
      }
      b.add_offset(b.psd_row(n, n), 1.0);
      blocks.push_back(b.finish());
      break;
    }
    case ConeKind::Socp: {
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          BlockBuilder b(ConeType::Psd, 3, nv);
          b.add(b.psd_row(0, 0), lay.lifted(i, i), 1.0);
          b.add(b.psd_row(0, 1), lay.lifted(i, j), 1.0);
          b.add(b.psd_row(1, 1), lay.lifted(j, j), 1.0);
          b.add(b.psd_row(0, 2), lay.x(i), 1.0);
          b.add(b.psd_row(1, 2), lay.x(j), 1.0);
          b.add_offset(b.psd_row(2, 2), 1.0);
          blocks.push_back(b.finish());
        }
      }
      for (Index i = 0; i < n; ++i) blocks.push_back(diag(i));
      break;
    }
    case ConeKind::Parabolic: {
      for (Index i = 0; i < n; ++i) blocks.push_back(diag(i));
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          for (const double sign : {-1.0, 1.0}) {
            Quad q;
            q.u = {{lay.lifted(i, i), 1.0}, {lay.lifted(j, j), 1.0}, {lay.lifted(i, j), 2.0 * sign}};
            q.w = {{lay.x(i), 1.0}, {lay.x(j), sign}};
            blocks.push_back(rsoc_block(q, nv));
          }
        }
      }
      break;
    }
  }
  return blocks;
}

ConicProgram build_relaxation(const BmiProblem& prob, ConeKind cone) {
  const Index n = prob.num_vars();
  const Index m = prob.side();
  const LiftLayout lay{n};
  ConicProgram prog;
  prog.nvars = lay.nvars();
  prog.objective = Vector::Zero(prog.nvars);
  prog.objective.head(n) = prob.objective();

  // -p(x, X) ⪰ 0
  BlockBuilder lmi(ConeType::Psd, m, prog.nvars);
  for (Index a = 0; a < m; ++a) {
    for (Index b = a; b < m; ++b) {
      const Index row = lmi.psd_row(a, b);
      lmi.add_offset(row, -prob.constant()(a, b));
      for (const auto& t : prob.linear()) lmi.add(row, lay.x(t.var), -t.coeff(a, b));
      for (const auto& t : prob.bilinear()) lmi.add(row, lay.lifted(t.i, t.j), -t.coeff(a, b));
    }
  }
  prog.blocks.push_back(lmi.finish());
  for (auto& b : encode_cone(cone, n)) prog.blocks.push_back(std::move(b));
  return prog;
}

ConicProgram build_penalized(const BmiProblem& prob, ConeKind cone, const PenaltyConfig& pen) {
  const Index n = prob.num_vars();
  pen.check(n);
  const LiftLayout lay{n};
  ConicProgram prog = build_relaxation(prob, cone);
  for (Index i = 0; i < n; ++i) {
    prog.objective[lay.lifted(i, i)] += pen.eta;
    prog.objective[lay.x(i)] -= 2.0 * pen.eta * pen.anchor[i];
  }
  prog.constant = pen.eta * pen.anchor.squaredNorm();
  return prog;
}

double penalty_value(const Vector& x, const SymMatrix& lifted, const PenaltyConfig& pen) {
  if (x.size() != lifted.dim() || x.size() != pen.anchor.size()) throw DimensionError("penalty_value: size mismatch");
  return pen.eta * (lifted.trace() - 2.0 * pen.anchor.dot(x) + pen.anchor.squaredNorm());
}

bool in_cone(ConeKind cone, const SymMatrix& h, double tol) {
  const Index n = h.dim();
  for (Index i = 0; i < n; ++i) {
    if (h(i, i) + tol < 0.0) return false;
  }
  switch (cone) {
    case ConeKind::Sdp:
      return min_eig_sym(h) + tol >= 0.0;
    case ConeKind::Socp:
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          if ((h(i, i) + tol) * (h(j, j) + tol) < h(i, j) * h(i, j)) return false;
        }
      }
      return true;
    case ConeKind::Parabolic:
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          if (h(i, i) + h(j, j) + 2.0 * tol < 2.0 * std::abs(h(i, j))) return false;
        }
      }
      return true;
  }
  return false;
}

}  // namespace seqbmi
