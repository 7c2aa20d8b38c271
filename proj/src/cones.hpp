#pragma once

// Symmetric-cone algebra for the interior-point backend: Jordan products,
// Nesterov-Todd scalings and step-to-boundary computations over a product
// of nonnegative orthants, second-order cones and PSD cones. PSD vectors use
// the isometric svec (off-diagonals scaled by sqrt(2)), so dot products are
// trace inner products.

#include "seqbmi/sym_linalg.hpp"

#include <vector>

namespace seqbmi::detail {

enum class ConeKind { Nonneg, Soc, Psd };

struct Cone {
  ConeKind kind;
  Index start;  // offset into the stacked slack vector
  Index dim;    // orthant length, SOC length, or PSD side
  Index len;    // rows occupied
};

Vector svec_isometric(const Matrix& m);
Matrix smat_isometric(const Eigen::Ref<const Vector>& v, Index side);

class ConeSet {
 public:
  void add(ConeKind kind, Index dim);

  const std::vector<Cone>& cones() const { return cones_; }
  Index length() const { return length_; }
  Index degree() const { return degree_; }

  Vector identity() const;
  /// Smallest "eigenvalue" of v over all cones; > 0 iff v is interior.
  double min_eig(const Vector& v) const;
  Vector jordan(const Vector& u, const Vector& v) const;

 private:
  std::vector<Cone> cones_;
  Index length_ = 0;
  Index degree_ = 0;
};

enum class Apply { W, Wt, Winv, WinvT };

/// Nesterov-Todd scaling W with W z = W⁻ᵀ s = λ.
class NtScaling {
 public:
  /// Throws std::runtime_error when s or z is not strictly interior.
  NtScaling(const ConeSet& cones, const Vector& s, const Vector& z);

  const Vector& lambda() const { return lambda_; }

  /// Applies the scaling to the rows of cone `c` in `block` (one column per
  /// vector, block.rows() == cone length).
  void apply(std::size_t c, Apply mode, Eigen::Ref<Matrix> block) const;
  Vector apply(Apply mode, const Vector& u) const;

  /// Solves λ ∘ x = w.
  Vector lambda_divide(const Vector& w) const;

  /// Largest α with λ + αΔ in the cone (capped at `cap`).
  double max_step(const Vector& delta, double cap) const;

 private:
  struct SocData {
    double beta = 1.0;
    Vector v;
  };
  struct PsdData {
    Matrix r;
    Matrix r_inv;
  };

  const ConeSet* cones_;
  Vector lambda_;
  std::vector<Vector> nonneg_;  // sqrt(s/z) per orthant
  std::vector<SocData> soc_;
  std::vector<PsdData> psd_;
  std::vector<std::size_t> slot_;  // per cone index into the matching vector
};

}  // namespace seqbmi::detail
