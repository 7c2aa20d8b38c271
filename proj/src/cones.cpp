#include "cones.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqbmi::detail {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInf = std::numeric_limits<double>::infinity();

double soc_min_eig(const Eigen::Ref<const Vector>& v) { return v[0] - v.tail(v.size() - 1).norm(); }

// Smallest α in (0, cap] where λ + αΔ leaves the second-order cone.
double soc_step(const Eigen::Ref<const Vector>& lam, const Eigen::Ref<const Vector>& d, double cap) {
  const Index k = lam.size();
  const double a = d[0] * d[0] - d.tail(k - 1).squaredNorm();
  const double b = lam[0] * d[0] - lam.tail(k - 1).dot(d.tail(k - 1));
  const double c = std::max(lam[0] * lam[0] - lam.tail(k - 1).squaredNorm(), 0.0);
  double best = cap;
  auto consider = [&](double root) {
    if (root > 0.0 && root < best) best = root;
  };
  // v0(α) = lam0 + α d0 must stay positive as well
  if (d[0] < 0.0) consider(-lam[0] / d[0]);
  if (a == 0.0) {
    if (b < 0.0) consider(-c / (2.0 * b));
    return best;
  }
  const double disc = b * b - a * c;
  if (disc < 0.0) return best;
  const double q = -(b + std::copysign(std::sqrt(disc), b));
  if (q != 0.0) {
    consider(q / a);
    consider(c / q);
  } else {
    consider(-b / a);
  }
  return best;
}

}  // namespace

Vector svec_isometric(const Matrix& m) {
  const Index n = m.rows();
  Vector v(svec_length(n));
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    v[k++] = m(i, i);
    for (Index j = i + 1; j < n; ++j) v[k++] = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
  return v;
}

Matrix smat_isometric(const Eigen::Ref<const Vector>& v, Index side) {
  Matrix m(side, side);
  Index k = 0;
  for (Index i = 0; i < side; ++i) {
    m(i, i) = v[k++];
    for (Index j = i + 1; j < side; ++j) {
      m(i, j) = v[k++] / kSqrt2;
      m(j, i) = m(i, j);
    }
  }
  return m;
}

void ConeSet::add(ConeKind kind, Index dim) {
  const Index len = kind == ConeKind::Psd ? svec_length(dim) : dim;
  cones_.push_back({kind, length_, dim, len});
  length_ += len;
  degree_ += kind == ConeKind::Soc ? 1 : dim;
}

Vector ConeSet::identity() const {
  Vector e = Vector::Zero(length_);
  for (const auto& c : cones_) {
    switch (c.kind) {
      case ConeKind::Nonneg: e.segment(c.start, c.len).setOnes(); break;
      case ConeKind::Soc: e[c.start] = 1.0; break;
      case ConeKind::Psd: e.segment(c.start, c.len) = svec_isometric(Matrix::Identity(c.dim, c.dim)); break;
    }
  }
  return e;
}

double ConeSet::min_eig(const Vector& v) const {
  double lo = kInf;
  for (const auto& c : cones_) {
    const auto seg = v.segment(c.start, c.len);
    switch (c.kind) {
      case ConeKind::Nonneg: lo = std::min(lo, seg.minCoeff()); break;
      case ConeKind::Soc: lo = std::min(lo, soc_min_eig(seg)); break;
      case ConeKind::Psd: {
        Eigen::SelfAdjointEigenSolver<Matrix> es(smat_isometric(seg, c.dim), Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues()[0]);
        break;
      }
    }
  }
  return lo;
}

Vector ConeSet::jordan(const Vector& u, const Vector& v) const {
  Vector out(length_);
  for (const auto& c : cones_) {
    const auto us = u.segment(c.start, c.len);
    const auto vs = v.segment(c.start, c.len);
    auto os = out.segment(c.start, c.len);
    switch (c.kind) {
      case ConeKind::Nonneg: os = us.cwiseProduct(vs); break;
      case ConeKind::Soc:
        os[0] = us.dot(vs);
        os.tail(c.len - 1) = us[0] * vs.tail(c.len - 1) + vs[0] * us.tail(c.len - 1);
        break;
      case ConeKind::Psd: {
        const Matrix um = smat_isometric(us, c.dim);
        const Matrix vm = smat_isometric(vs, c.dim);
        os = svec_isometric(0.5 * (um * vm + vm * um));
        break;
      }
    }
  }
  return out;
}

NtScaling::NtScaling(const ConeSet& cones, const Vector& s, const Vector& z)
    : cones_(&cones), lambda_(cones.length()) {
  for (const auto& c : cones.cones()) {
    const auto ss = s.segment(c.start, c.len);
    const auto zs = z.segment(c.start, c.len);
    auto lam = lambda_.segment(c.start, c.len);
    switch (c.kind) {
      case ConeKind::Nonneg: {
        if ((ss.array() <= 0.0).any() || (zs.array() <= 0.0).any()) throw std::runtime_error("NtScaling: orthant point not interior");
        slot_.push_back(nonneg_.size());
        nonneg_.push_back((ss.array() / zs.array()).sqrt().matrix());
        lam = (ss.array() * zs.array()).sqrt().matrix();
        break;
      }
      case ConeKind::Soc: {
        const Index k = c.len;
        const double sj = ss[0] * ss[0] - ss.tail(k - 1).squaredNorm();
        const double zj = zs[0] * zs[0] - zs.tail(k - 1).squaredNorm();
        if (ss[0] <= 0.0 || zs[0] <= 0.0 || sj <= 0.0 || zj <= 0.0) throw std::runtime_error("NtScaling: SOC point not interior");
        const double sn = std::sqrt(sj);
        const double zn = std::sqrt(zj);
        const Vector sbar = ss / sn;
        const Vector zbar = zs / zn;
        const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
        Vector wbar(k);
        wbar[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
        wbar.tail(k - 1) = (sbar.tail(k - 1) - zbar.tail(k - 1)) / (2.0 * gamma);
        SocData d;
        d.beta = std::sqrt(sn / zn);
        d.v = wbar;
        d.v[0] += 1.0;
        d.v /= std::sqrt(2.0 * (wbar[0] + 1.0));
        slot_.push_back(soc_.size());
        soc_.push_back(std::move(d));
        Matrix col = zs;
        apply(slot_.size() - 1, Apply::W, col);
        lam = col;
        break;
      }
      case ConeKind::Psd: {
        const Matrix sm = smat_isometric(ss, c.dim);
        const Matrix zm = smat_isometric(zs, c.dim);
        Eigen::LLT<Matrix> ls(sm);
        Eigen::LLT<Matrix> lz(zm);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) throw std::runtime_error("NtScaling: PSD point not interior");
        const Matrix lsm = ls.matrixL();
        const Matrix lzm = lz.matrixL();
        Eigen::JacobiSVD<Matrix> svd(lzm.transpose() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vector sv = svd.singularValues();
        if (sv.minCoeff() <= 0.0) throw std::runtime_error("NtScaling: PSD scaling singular");
        const Vector isq = sv.cwiseSqrt().cwiseInverse();
        PsdData d;
        d.r = lsm * svd.matrixV() * isq.asDiagonal();
        const Matrix lsinv = lsm.triangularView<Eigen::Lower>().solve(Matrix::Identity(c.dim, c.dim));
        d.r_inv = sv.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * lsinv;
        slot_.push_back(psd_.size());
        psd_.push_back(std::move(d));
        lam = svec_isometric(sv.asDiagonal().toDenseMatrix());
        break;
      }
    }
  }
}

void NtScaling::apply(std::size_t ci, Apply mode, Eigen::Ref<Matrix> block) const {
  const Cone& c = cones_->cones()[ci];
  const std::size_t slot = slot_[ci];
  switch (c.kind) {
    case ConeKind::Nonneg: {
      const Vector& d = nonneg_[slot];
      if (mode == Apply::W || mode == Apply::Wt) {
        block = d.asDiagonal() * block;
      } else {
        block = d.cwiseInverse().asDiagonal() * block;
      }
      break;
    }
    case ConeKind::Soc: {
      const SocData& d = soc_[slot];
      const Index k = c.len;
      if (mode == Apply::W || mode == Apply::Wt) {
        // β (2 v vᵀ - J) u
        const Eigen::RowVectorXd vu = d.v.transpose() * block;
        Matrix ju = -block;
        ju.row(0) = block.row(0);
        block = d.beta * (2.0 * d.v * vu - ju);
      } else {
        // β⁻¹ (2 J v vᵀ J - J) u
        Vector jv = -d.v;
        jv[0] = d.v[0];
        const Eigen::RowVectorXd jvu = jv.transpose() * block;
        Matrix ju = -block;
        ju.row(0) = block.row(0);
        block = (2.0 * jv * jvu - ju) / d.beta;
      }
      (void)k;
      break;
    }
    case ConeKind::Psd: {
      const PsdData& d = psd_[slot];
      Matrix t;
      switch (mode) {
        case Apply::W: t = d.r.transpose(); break;
        case Apply::Wt: t = d.r; break;
        case Apply::Winv: t = d.r_inv.transpose(); break;
        case Apply::WinvT: t = d.r_inv; break;
      }
      for (Index col = 0; col < block.cols(); ++col) {
        const Matrix u = smat_isometric(block.col(col), c.dim);
        block.col(col) = svec_isometric(t * u * t.transpose());
      }
      break;
    }
  }
}

Vector NtScaling::apply(Apply mode, const Vector& u) const {
  Vector out = u;
  const auto& cones = cones_->cones();
  for (std::size_t ci = 0; ci < cones.size(); ++ci) {
    Matrix seg = out.segment(cones[ci].start, cones[ci].len);
    apply(ci, mode, seg);
    out.segment(cones[ci].start, cones[ci].len) = seg;
  }
  return out;
}

Vector NtScaling::lambda_divide(const Vector& w) const {
  Vector x(w.size());
  for (const auto& c : cones_->cones()) {
    const auto lam = lambda_.segment(c.start, c.len);
    const auto ws = w.segment(c.start, c.len);
    auto xs = x.segment(c.start, c.len);
    switch (c.kind) {
      case ConeKind::Nonneg: xs = ws.cwiseQuotient(lam); break;
      case ConeKind::Soc: {
        const Index k = c.len;
        const double det = lam[0] * lam[0] - lam.tail(k - 1).squaredNorm();
        const double x0 = (lam[0] * ws[0] - lam.tail(k - 1).dot(ws.tail(k - 1))) / det;
        xs[0] = x0;
        xs.tail(k - 1) = (ws.tail(k - 1) - x0 * lam.tail(k - 1)) / lam[0];
        break;
      }
      case ConeKind::Psd: {
        // λ is diagonal in the NT basis: x_ij = 2 w_ij / (l_i + l_j)
        Vector diag(c.dim);
        {
          Index k = 0;
          for (Index i = 0; i < c.dim; ++i) {
            diag[i] = lam[k];
            k += c.dim - i;
          }
        }
        Index k = 0;
        for (Index i = 0; i < c.dim; ++i) {
          for (Index j = i; j < c.dim; ++j, ++k) xs[k] = 2.0 * ws[k] / (diag[i] + diag[j]);
        }
        break;
      }
    }
  }
  return x;
}

double NtScaling::max_step(const Vector& delta, double cap) const {
  double best = cap;
  for (const auto& c : cones_->cones()) {
    const auto lam = lambda_.segment(c.start, c.len);
    const auto d = delta.segment(c.start, c.len);
    switch (c.kind) {
      case ConeKind::Nonneg:
        for (Index i = 0; i < c.len; ++i) {
          if (d[i] < 0.0) best = std::min(best, -lam[i] / d[i]);
        }
        break;
      case ConeKind::Soc: best = std::min(best, soc_step(lam, d, best)); break;
      case ConeKind::Psd: {
        const Matrix lm = smat_isometric(lam, c.dim);
        const Vector isq = lm.diagonal().cwiseSqrt().cwiseInverse();
        const Matrix scaled = isq.asDiagonal() * smat_isometric(d, c.dim) * isq.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Matrix> es(scaled, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues()[0];
        if (lo < 0.0) best = std::min(best, -1.0 / lo);
        break;
      }
    }
  }
  return best;
}

}  // namespace seqbmi::detail
