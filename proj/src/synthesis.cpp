#include "seqbmi/synthesis.hpp"

#include "seqbmi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seqbmi {

namespace {

// Symmetric unit matrix for svec entry (a, b).
Matrix unit_sym(Index n, Index a, Index b) {
  Matrix e = Matrix::Zero(n, n);
  e(a, b) = 1.0;
  e(b, a) = 1.0;
  return e;
}

void add_sym_block(Matrix& m, Index r0, Index c0, const Matrix& blk) {
  m.block(r0, c0, blk.rows(), blk.cols()) += blk;
  if (r0 != c0) m.block(c0, r0, blk.cols(), blk.rows()) += blk.transpose();
}

void require_zero(const Matrix& m, const char* name, const char* kind) {
  const double nrm = m.size() ? m.norm() : 0.0;
  if (nrm != 0.0) {
    throw ValidationError(std::string(kind) + " synthesis requires " + name + " = 0 (got ||" + name + "|| = " + std::to_string(nrm) + ")");
  }
}

std::string entry_name(const char* sym, Index i, Index j) {
  return std::string(sym) + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void finish_scaling(SynthesisProblem& sp, double eta, Scaling scaling) {
  if (!(eta > 0.0)) throw ValidationError("synthesis: eta must be positive");
  sp.varmap.scale = scaling == Scaling::Standard ? scale_vector(sp.varmap, eta, sp.bilinear_vars)
                                              : Vector::Ones(sp.varmap.size());
  sp.bmi = sp.raw.rescaled(sp.varmap.scale);
}

}  // namespace

ControllerStructure::ControllerStructure(std::vector<Matrix> basis) : basis_(std::move(basis)) {
  if (basis_.empty()) throw ValidationError("controller structure: basis is empty");
  const Index nu = basis_.front().rows();
  const Index ny = basis_.front().cols();
  Matrix used = Matrix::Zero(nu, ny);
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const Matrix& e = basis_[i];
    if (e.rows() != nu || e.cols() != ny) throw ValidationError("controller structure: E_" + std::to_string(i) + " has a different shape");
    if (((e.array() != 0.0) && (e.array() != 1.0)).any()) throw ValidationError("controller structure: E_" + std::to_string(i) + " is not binary");
    if ((used.array() * e.array()).any()) throw ValidationError("controller structure: E_" + std::to_string(i) + " overlaps another basis matrix");
    if (e.sum() == 0.0) throw ValidationError("controller structure: E_" + std::to_string(i) + " is zero");
    used += e;
  }
}

ControllerStructure ControllerStructure::centralized(Index nu, Index ny) {
  return from_mask(Matrix::Ones(nu, ny));
}

ControllerStructure ControllerStructure::diagonal(Index nu, Index ny) {
  Matrix mask = Matrix::Zero(nu, ny);
  for (Index i = 0; i < std::min(nu, ny); ++i) mask(i, i) = 1.0;
  return from_mask(mask);
}

ControllerStructure ControllerStructure::from_mask(const Matrix& mask) {
  std::vector<Matrix> basis;
  for (Index i = 0; i < mask.rows(); ++i) {
    for (Index j = 0; j < mask.cols(); ++j) {
      if (mask(i, j) != 0.0) {
        Matrix e = Matrix::Zero(mask.rows(), mask.cols());
        e(i, j) = 1.0;
        basis.push_back(std::move(e));
      }
    }
  }
  return ControllerStructure(std::move(basis));
}

Matrix ControllerStructure::mask() const {
  Matrix m = Matrix::Zero(nu(), ny());
  for (const auto& e : basis_) m += e;
  return m;
}

Matrix controller_gain(const Vector& h, const ControllerStructure& s) {
  if (h.size() != s.size()) throw DimensionError("controller_gain: h has length " + std::to_string(h.size()) + ", expected " + std::to_string(s.size()));
  Matrix k = Matrix::Zero(s.nu(), s.ny());
  for (Index i = 0; i < h.size(); ++i) k += h[i] * s.basis()[static_cast<std::size_t>(i)];
  return k;
}

Vector scale_vector(const VarMap& varmap, double eta, const std::set<Index>& bilinear_vars) {
  const double small = std::min(0.5 * eta, 0.01);
  Vector s = Vector::Constant(varmap.size(), small);
  for (const Index i : bilinear_vars) {
    if (i >= 0 && i < s.size()) s[i] = 1.0;
  }
  return s;
}

std::set<Index> bilinear_participation(const BmiProblem& prob) {
  std::set<Index> out;
  for (const auto& t : prob.bilinear()) {
    if (t.coeff.dense().cwiseAbs().maxCoeff() > 0.0) {
      out.insert(t.i);
      out.insert(t.j);
    }
  }
  return out;
}

SynthesisProblem build_h2(const Plant& p, const ControllerStructure& s, double eta, Scaling scaling) {
  p.check();
  require_zero(p.D11, "D11", "H2");
  require_zero(p.D21, "D21", "H2");
  if (s.nu() != p.nu() || s.ny() != p.ny()) throw DimensionError("build_h2: controller structure does not match plant nu x ny");
  const Index nx = p.nx();
  const Index nz = p.nz();
  const Index l = s.size();
  const Index nw_vars = svec_length(nz);
  const Index np_vars = svec_length(nx);
  const Index n = nw_vars + np_vars + l;
  const Index m = 2 * nx + nz;
  const Index o2 = nx;
  const Index o3 = nx + nz;

  SynthesisProblem sp;
  sp.kind = NormKind::H2;
  sp.plant = p;
  sp.structure = s;
  sp.h_offset = nw_vars + np_vars;

  BmiBuilder b(n, m);
  b.constant().block(0, 0, nx, nx) = regularize_b1(p.B1).dense();
  for (Index i = 0; i < nz; ++i) {
    for (Index j = i; j < nz; ++j) {
      const Index v = svec_index(nz, i, j);
      sp.varmap.names.push_back(entry_name("W", i, j));
      if (i == j) b.objective()[v] = 1.0;
      b.linear(v).block(o2, o2, nz, nz) -= unit_sym(nz, i, j);
    }
  }
  for (Index i = 0; i < nx; ++i) {
    for (Index j = i; j < nx; ++j) {
      const Index v = nw_vars + svec_index(nx, i, j);
      sp.varmap.names.push_back(entry_name("P", i, j));
      sp.bilinear_vars.insert(v);
      const Matrix e = unit_sym(nx, i, j);
      Matrix& k = b.linear(v);
      k.block(0, 0, nx, nx) += p.A * e + e * p.A.transpose();
      add_sym_block(k, o2, o3, p.C1 * e);
      k.block(o3, o3, nx, nx) -= e;
      for (Index q = 0; q < l; ++q) {
        const Matrix& eq = s.basis()[static_cast<std::size_t>(q)];
        Matrix& lq = b.bilinear(v, sp.h_offset + q);
        const Matrix bkc = p.B * eq * p.C * e;
        lq.block(0, 0, nx, nx) += bkc + bkc.transpose();
        add_sym_block(lq, o2, o3, p.D12 * eq * p.C * e);
      }
    }
  }
  for (Index q = 0; q < l; ++q) {
    sp.varmap.names.push_back("h" + std::to_string(q));
    sp.bilinear_vars.insert(sp.h_offset + q);
  }
  sp.raw = b.finish();
  finish_scaling(sp, eta, scaling);
  return sp;
}

SynthesisProblem build_hinf(const Plant& p, const ControllerStructure& s, double eta, Scaling scaling) {
  p.check();
  require_zero(p.D21, "D21", "Hinf");
  if (s.nu() != p.nu() || s.ny() != p.ny()) throw DimensionError("build_hinf: controller structure does not match plant nu x ny");
  const Index nx = p.nx();
  const Index nz = p.nz();
  const Index nw = p.nw();
  const Index l = s.size();
  const Index nq_vars = svec_length(nx);
  const Index n = nq_vars + l + 1;
  const Index m = 2 * nx + nz + nw;
  const Index o2 = nx;
  const Index o3 = 2 * nx;
  const Index o4 = 2 * nx + nz;

  SynthesisProblem sp;
  sp.kind = NormKind::Hinf;
  sp.plant = p;
  sp.structure = s;
  sp.h_offset = nq_vars;
  const Index gamma = nq_vars + l;

  BmiBuilder b(n, m);
  add_sym_block(b.constant(), o2, o4, p.B1);
  add_sym_block(b.constant(), o3, o4, p.D11);
  for (Index i = 0; i < nx; ++i) {
    for (Index j = i; j < nx; ++j) {
      const Index v = svec_index(nx, i, j);
      sp.varmap.names.push_back(entry_name("Q", i, j));
      sp.bilinear_vars.insert(v);
      const Matrix e = unit_sym(nx, i, j);
      Matrix& k = b.linear(v);
      k.block(0, 0, nx, nx) -= e;
      k.block(o2, o2, nx, nx) += p.A * e + e * p.A.transpose();
      add_sym_block(k, o2, o3, e * p.C1.transpose());
      for (Index q = 0; q < l; ++q) {
        const Matrix& eq = s.basis()[static_cast<std::size_t>(q)];
        Matrix& lq = b.bilinear(v, sp.h_offset + q);
        const Matrix bkc = p.B * eq * p.C * e;
        lq.block(o2, o2, nx, nx) += bkc + bkc.transpose();
        add_sym_block(lq, o2, o3, (p.D12 * eq * p.C * e).transpose());
      }
    }
  }
  for (Index q = 0; q < l; ++q) {
    sp.varmap.names.push_back("h" + std::to_string(q));
    sp.bilinear_vars.insert(sp.h_offset + q);
  }
  sp.varmap.names.push_back("gamma");
  b.objective()[gamma] = 1.0;
  Matrix& kg = b.linear(gamma);
  kg.block(o3, o3, nz, nz) -= Matrix::Identity(nz, nz);
  kg.block(o4, o4, nw, nw) -= Matrix::Identity(nw, nw);
  sp.raw = b.finish();
  finish_scaling(sp, eta, scaling);
  return sp;
}

SynthesisProblem build_synthesis(NormKind kind, const Plant& p, const ControllerStructure& s, double eta, Scaling scaling) {
  return kind == NormKind::H2 ? build_h2(p, s, eta, scaling) : build_hinf(p, s, eta, scaling);
}

Vector pack_h2(const SymMatrix& w, const SymMatrix& p, const Vector& h) {
  const SymVec sw = svec(w);
  const SymVec spv = svec(p);
  Vector x(sw.size() + spv.size() + h.size());
  x << sw.data(), spv.data(), h;
  return x;
}

Vector pack_hinf(const SymMatrix& q, const Vector& h, double gamma) {
  const SymVec sq = svec(q);
  Vector x(sq.size() + h.size() + 1);
  x << sq.data(), h, gamma;
  return x;
}

ControllerResult extract_controller(const Vector& x_scaled, const SynthesisProblem& sp) {
  if (x_scaled.size() != sp.varmap.size()) {
    throw DimensionError("extract_controller: expected " + std::to_string(sp.varmap.size()) + " variables, got " +
                         std::to_string(x_scaled.size()));
  }
  ControllerResult r;
  r.raw = x_scaled.cwiseQuotient(sp.varmap.scale);
  r.h = r.raw.segment(sp.h_offset, sp.structure.size());
  r.K = controller_gain(r.h, sp.structure);
  r.bound = sp.raw.objective().dot(r.raw);
  const ClosedLoop cl = closed_loop(sp.plant, r.K);
  r.max_real_eig = max_real_eig(cl.A);
  r.stabilizing = certify_stability(cl.A);
  r.norm = closed_loop_norm(cl, sp.kind);
  return r;
}

}  // namespace seqbmi
