#include "seqbmi/kernels.hpp"

#include <Eigen/SVD>

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seqbmi::kernels {

namespace {

void scatter_gram(const ColumnSlice& slice, Matrix& h) {
  const Matrix local = slice.values.transpose() * slice.values;
  const auto k = static_cast<Index>(slice.columns.size());
  for (Index q = 0; q < k; ++q) {
    const Index col = slice.columns[q];
    for (Index p = 0; p < k; ++p) h(slice.columns[p], col) += local(p, q);
  }
}

}  // namespace

Matrix normal_matrix_serial(std::span<const ColumnSlice> slices, Index n) {
  Matrix h = Matrix::Zero(n, n);
  for (const auto& slice : slices) scatter_gram(slice, h);
  return h;
}

Matrix normal_matrix_parallel(std::span<const ColumnSlice> slices, Index n) {
#ifdef _OPENMP
  const auto count = static_cast<long long>(slices.size());
  if (omp_get_max_threads() <= 1 || count < 2) return normal_matrix_serial(slices, n);
  Matrix h = Matrix::Zero(n, n);
#pragma omp parallel
  {
    Matrix local = Matrix::Zero(n, n);
#pragma omp for schedule(dynamic, 8)
    for (long long b = 0; b < count; ++b) scatter_gram(slices[static_cast<std::size_t>(b)], local);
#pragma omp critical(seqbmi_normal_matrix)
    h += local;
  }
  return h;
#else
  return normal_matrix_serial(slices, n);
#endif
}

double gain_at(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, double omega) {
  using CMatrix = Eigen::MatrixXcd;
  const Index n = a.rows();
  CMatrix resolvent = CMatrix::Identity(n, n) * std::complex<double>(0.0, omega) - a.cast<std::complex<double>>();
  const CMatrix x = resolvent.partialPivLu().solve(b.cast<std::complex<double>>());
  const CMatrix g = c.cast<std::complex<double>>() * x + d.cast<std::complex<double>>();
  if (g.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(g);
  return svd.singularValues()[0];
}

double peak_gain_serial(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                        std::span<const double> omegas) {
  double best = 0.0;
  for (double w : omegas) best = std::max(best, gain_at(a, b, c, d, w));
  return best;
}

double peak_gain_parallel(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                          std::span<const double> omegas) {
  double best = 0.0;
  const auto count = static_cast<long long>(omegas.size());
#pragma omp parallel for reduction(max : best) schedule(static)
  for (long long k = 0; k < count; ++k) best = std::max(best, gain_at(a, b, c, d, omegas[static_cast<std::size_t>(k)]));
  return best;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace seqbmi::kernels
