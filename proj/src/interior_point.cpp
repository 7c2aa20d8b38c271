#include "interior_point.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <stdexcept>

namespace seqbmi::detail {

namespace {

Vector g_times(const StandardForm& f, const Vector& x) {
  Vector out(f.cones.length());
  const auto& cones = f.cones.cones();
  for (std::size_t k = 0; k < cones.size(); ++k) {
    const auto& sl = f.g[k];
    Vector xs(static_cast<Index>(sl.columns.size()));
    for (std::size_t q = 0; q < sl.columns.size(); ++q) xs[static_cast<Index>(q)] = x[sl.columns[q]];
    out.segment(cones[k].start, cones[k].len) = sl.values * xs;
  }
  return out;
}

Vector gt_times(const std::vector<kernels::ColumnSlice>& slices, const ConeSet& cones, const Vector& z, Index n) {
  Vector out = Vector::Zero(n);
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const auto& sl = slices[k];
    const Vector part = sl.values.transpose() * z.segment(cones.cones()[k].start, cones.cones()[k].len);
    for (std::size_t q = 0; q < sl.columns.size(); ++q) out[sl.columns[q]] += part[static_cast<Index>(q)];
  }
  return out;
}

// Reduced KKT system  [H Aᵀ; A 0] for the current scaling.
class KktSolver {
 public:
  KktSolver(const StandardForm& f, const NtScaling& w) : f_(f) {
    scaled_ = f.g;
    const auto& cones = f.cones.cones();
#pragma omp parallel for schedule(dynamic, 4)
    for (long long k = 0; k < static_cast<long long>(cones.size()); ++k) {
      w.apply(static_cast<std::size_t>(k), Apply::WinvT, scaled_[static_cast<std::size_t>(k)].values);
    }
    h_ = kernels::normal_matrix_parallel(scaled_, f.n);
    const Index p = f.a.rows();
    const double reg = 1e-13 * std::max(1.0, h_.diagonal().cwiseAbs().maxCoeff());
    if (p == 0) {
      llt_.compute(h_);
      if (llt_.info() != Eigen::Success) {
        llt_.compute(h_ + reg * Matrix::Identity(f.n, f.n));
        if (llt_.info() != Eigen::Success) throw std::runtime_error("KKT factorization failed");
      }
    } else {
      Matrix k = Matrix::Zero(f.n + p, f.n + p);
      k.topLeftCorner(f.n, f.n) = h_ + reg * Matrix::Identity(f.n, f.n);
      k.topRightCorner(f.n, p) = f.a.transpose();
      k.bottomLeftCorner(p, f.n) = f.a;
      k.bottomRightCorner(p, p) = -reg * Matrix::Identity(p, p);
      lu_.compute(k);
      k.topLeftCorner(f.n, f.n) = h_;
      k.bottomRightCorner(p, p).setZero();
      full_ = std::move(k);
    }
  }

  // Solves A'uy + G'uz = bx, A ux = by, G ux - W'W uz = bz, given
  // bzs = W⁻ᵀ bz. Returns the scaled uz̃ = W uz.
  void solve(const Vector& bx, const Vector& by, const Vector& bzs, Vector& ux, Vector& uy, Vector& uzs) const {
    const Index n = f_.n;
    const Index p = f_.a.rows();
    const Vector rhs1 = bx + gt_times(scaled_, f_.cones, bzs, n);
    if (p == 0) {
      ux = llt_.solve(rhs1);
      for (int it = 0; it < 3; ++it) ux += llt_.solve(rhs1 - h_ * ux);
      uy.resize(0);
    } else {
      Vector rhs(n + p);
      rhs << rhs1, by;
      Vector sol = lu_.solve(rhs);
      for (int it = 0; it < 3; ++it) sol += lu_.solve(rhs - full_ * sol);
      ux = sol.head(n);
      uy = sol.tail(p);
    }
    uzs = scaled_times(ux) - bzs;
  }

 private:
  Vector scaled_times(const Vector& x) const {
    Vector out(f_.cones.length());
    const auto& cones = f_.cones.cones();
    for (std::size_t k = 0; k < cones.size(); ++k) {
      const auto& sl = scaled_[k];
      Vector xs(static_cast<Index>(sl.columns.size()));
      for (std::size_t q = 0; q < sl.columns.size(); ++q) xs[static_cast<Index>(q)] = x[sl.columns[q]];
      out.segment(cones[k].start, cones[k].len) = sl.values * xs;
    }
    return out;
  }

  const StandardForm& f_;
  std::vector<kernels::ColumnSlice> scaled_;
  Matrix h_;
  Matrix full_;
  Eigen::LLT<Matrix> llt_;
  Eigen::PartialPivLU<Matrix> lu_;
};

void push_interior(const ConeSet& cones, Vector& v) {
  const double t = -cones.min_eig(v);
  if (t >= -1e-8 * std::max(v.norm(), 1.0)) v += (1.0 + t) * cones.identity();
}

}  // namespace

IpmResult interior_point(const StandardForm& f, const SolverSettings& settings) {
  const Index n = f.n;
  const Index p = f.a.rows();
  const double tol = settings.tol;
  const Vector e = f.cones.identity();
  const double degree = static_cast<double>(f.cones.degree());

  IpmResult result;
  const bool debug = std::getenv("SEQBMI_IPM_DEBUG") != nullptr;
  Vector x, y, z, s;
  double tau = 1.0, kappa = 1.0;

  try {
    const NtScaling unit(f.cones, e, e);
    KktSolver kkt(f, unit);
    Vector uz;
    kkt.solve(Vector::Zero(n), f.b, f.h, x, y, uz);
    s = -uz;
    Vector xd;
    kkt.solve(-f.c, Vector::Zero(p), Vector::Zero(f.cones.length()), xd, y, z);
  } catch (const std::exception&) {
    result.status = SolveStatus::NumericalLimit;
    result.x = Vector::Zero(n);
    return result;
  }
  push_interior(f.cones, s);
  push_interior(f.cones, z);

  const double resx0 = std::max(1.0, f.c.norm());
  const double resy0 = std::max(1.0, f.b.norm());
  const double resz0 = std::max(1.0, f.h.norm());

  auto finish = [&](SolveStatus status, int iters) {
    result.status = status;
    result.iterations = iters;
    result.x = x / tau;
    return result;
  };

  for (int iter = 0; iter <= settings.max_iter; ++iter) {
    const Vector ax = p > 0 ? Vector(f.a * x) : Vector::Zero(0);
    const Vector aty = p > 0 ? Vector(f.a.transpose() * y) : Vector::Zero(n);
    const Vector gx = g_times(f, x);
    const Vector gtz = gt_times(f.g, f.cones, z, n);
    const Vector rx = aty + gtz + tau * f.c;
    const Vector ry = p > 0 ? Vector(ax - tau * f.b) : Vector::Zero(0);
    const Vector rz = gx + s - tau * f.h;
    const double cx = f.c.dot(x);
    const double by = p > 0 ? f.b.dot(y) : 0.0;
    const double hz = f.h.dot(z);
    const double rt = kappa + cx + by + hz;
    const double gap = s.dot(z);
    const double mu = (gap + tau * kappa) / (degree + 1.0);

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double pres = std::max(p > 0 ? ry.norm() / resy0 : 0.0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    const double abs_gap = gap / (tau * tau);
    std::optional<double> rel_gap;
    if (pcost < 0.0) rel_gap = abs_gap / -pcost;
    else if (dcost > 0.0) rel_gap = abs_gap / dcost;

    if (debug) std::fprintf(stderr, "%3d pc %.6e dc %.6e pres %.2e dres %.2e gap %.2e tau %.2e kap %.2e\n", iter, pcost, dcost, pres, dres, abs_gap, tau, kappa);
    if (pres <= tol && dres <= tol && (abs_gap <= tol || (rel_gap && *rel_gap <= tol))) {
      // Also demand that the recovered primal point itself is feasible to tol.
      const Vector xh = x / tau;
      double viol = std::max(0.0, -f.cones.min_eig(f.h - g_times(f, xh)));
      if (p > 0) viol = std::max(viol, (f.a * xh - f.b).cwiseAbs().maxCoeff());
      if (viol <= tol) return finish(SolveStatus::Optimal, iter);
    }
    if (by + hz < 0.0) {
      const double pinf = (aty + gtz).norm() / resx0 / -(by + hz);
      if (pinf <= tol) {
        result.status = SolveStatus::Infeasible;
        result.iterations = iter;
        return result;
      }
    }
    if (cx < 0.0) {
      const double dinf = std::max(p > 0 ? ax.norm() / resy0 : 0.0, (gx + s).norm() / resz0) / -cx;
      if (dinf <= tol) {
        result.status = SolveStatus::Unbounded;
        result.iterations = iter;
        return result;
      }
    }
    if (iter == settings.max_iter) return finish(SolveStatus::IterationLimit, iter);

    try {
      const NtScaling w(f.cones, s, z);
      const Vector& lam = w.lambda();
      const KktSolver kkt(f, w);

      const Vector hs = w.apply(Apply::WinvT, f.h);
      Vector x1, y1, z1;
      kkt.solve(-f.c, f.b, hs, x1, y1, z1);
      const double denom_base = f.c.dot(x1) + (p > 0 ? f.b.dot(y1) : 0.0) + hs.dot(z1);

      const Vector lamlam = f.cones.jordan(lam, lam);
      const Vector rzs = w.apply(Apply::WinvT, rz);

      struct Direction {
        Vector dx, dy, dz, ds;
        double dtau = 0.0, dkappa = 0.0;
      };
      auto direction = [&](double gamma, const Vector& corr_s, double corr_k) {
        const Vector rs = -lamlam + gamma * mu * e - corr_s;
        const double rk = -tau * kappa + gamma * mu - corr_k;
        const Vector lrs = w.lambda_divide(rs);
        Vector x2, y2, z2;
        const Vector bx = -(1.0 - gamma) * rx;
        const Vector byv = p > 0 ? Vector(-(1.0 - gamma) * ry) : Vector::Zero(0);
        const Vector bzs = -(1.0 - gamma) * rzs - lrs;
        kkt.solve(bx, byv, bzs, x2, y2, z2);
        Direction d;
        const double num = -(1.0 - gamma) * rt - rk / tau - f.c.dot(x2) - (p > 0 ? f.b.dot(y2) : 0.0) - hs.dot(z2);
        d.dtau = num / (-kappa / tau + denom_base);
        d.dx = x2 + d.dtau * x1;
        d.dy = p > 0 ? Vector(y2 + d.dtau * y1) : Vector::Zero(0);
        d.dz = z2 + d.dtau * z1;
        d.ds = lrs - d.dz;
        d.dkappa = (rk - kappa * d.dtau) / tau;
        return d;
      };
      auto step_length = [&](const Direction& d, double cap) {
        double a = cap;
        a = w.max_step(d.ds, a);
        a = w.max_step(d.dz, a);
        if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
        if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
        return a;
      };

      const Direction aff = direction(0.0, Vector::Zero(e.size()), 0.0);
      const double alpha_aff = step_length(aff, 1.0);
      const double sigma = std::pow(1.0 - alpha_aff, 3);
      const Direction d = direction(sigma, f.cones.jordan(aff.ds, aff.dz), aff.dtau * aff.dkappa);
      const double alpha = std::min(1.0, 0.99 * step_length(d, 1.0 / 0.99));
      if (debug) std::fprintf(stderr, "    alpha_aff %.3e alpha %.3e\n", alpha_aff, alpha);
      if (!(alpha > 1e-12)) return finish(SolveStatus::NumericalLimit, iter);

      x += alpha * d.dx;
      if (p > 0) y += alpha * d.dy;
      z += alpha * w.apply(Apply::Winv, d.dz);
      s += alpha * w.apply(Apply::Wt, d.ds);
      tau += alpha * d.dtau;
      kappa += alpha * d.dkappa;
      if (!x.allFinite() || !std::isfinite(tau) || tau <= 0.0) return finish(SolveStatus::NumericalLimit, iter);
    } catch (const std::exception& ex) {
      if (debug) std::fprintf(stderr, "    exception: %s\n", ex.what());
      return finish(SolveStatus::NumericalLimit, iter);
    }
  }
  return finish(SolveStatus::IterationLimit, settings.max_iter);
}

}  // namespace seqbmi::detail
