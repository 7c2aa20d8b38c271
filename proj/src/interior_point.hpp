#pragma once

#include "cones.hpp"
#include "seqbmi/conic.hpp"
#include "seqbmi/kernels.hpp"

#include <vector>

namespace seqbmi::detail {

// minimize cᵀx  s.t.  A x = b,  G x + s = h,  s ∈ K.
// G is stored per cone as dense slices over the columns each cone touches.
struct StandardForm {
  Index n = 0;
  Vector c;
  Matrix a;
  Vector b;
  ConeSet cones;
  std::vector<kernels::ColumnSlice> g;  // one per cone, rows == cone.len
  Vector h;
};

struct IpmResult {
  SolveStatus status = SolveStatus::NumericalLimit;
  Vector x;
  int iterations = 0;
};

IpmResult interior_point(const StandardForm& form, const SolverSettings& settings);

}  // namespace seqbmi::detail
