#pragma once

#include "seqbmi/sym_linalg.hpp"

#include <complex>
#include <span>
#include <vector>

// Data-parallel kernels used by the interior-point backend and the system
// norm routines. Each kernel has a serial reference and an OpenMP version
// that must agree with it to rounding; tests and bench/ compare the two.
namespace seqbmi::kernels {

/// Dense rows of a constraint block restricted to the variables it touches.
struct ColumnSlice {
  Matrix values;               // block rows × columns.size()
  std::vector<Index> columns;  // global variable indices, ascending
};

/// H = Σ_b S_bᵀ S_b, scattered into the n × n normal matrix.
Matrix normal_matrix_serial(std::span<const ColumnSlice> slices, Index n);
Matrix normal_matrix_parallel(std::span<const ColumnSlice> slices, Index n);

/// max over ω of σ_max(C (jωI - A)⁻¹ B + D).
double peak_gain_serial(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                        std::span<const double> omegas);
double peak_gain_parallel(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                          std::span<const double> omegas);

/// σ_max of the transfer matrix at one frequency.
double gain_at(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, double omega);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace seqbmi::kernels
