// Dense vector kernels. Each data-parallel kernel has a serial reference
// twin; both produce bitwise-identical results because every output element
// is computed by the same scalar code in a fixed order.

#ifndef CITETIME_KERNELS_HPP
#define CITETIME_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <span>

#include "citetime/common.hpp"

namespace citetime::kernels {

/// Dot product with four interleaved accumulators (fixed summation order).
inline Real dot(const Real* a, const Real* b, std::size_t n) {
  Real s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline Real dot(std::span<const Real> a, std::span<const Real> b) {
  return dot(a.data(), b.data(), a.size());
}

/// y += alpha * x
inline void axpy(Real alpha, const Real* x, Real* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

/// Cosine of two equal-length vectors; 0 when either has zero norm.
Real cosine(const Real* a, const Real* b, std::size_t n, bool* degenerate = nullptr);

/// Cosine of `query` against rows `rows[i]` of a row-major matrix with
/// `dim` columns; a negative row index yields NaN in `out[i]`.
void cosine_scores_serial(std::span<const Real> query, const Real* matrix,
                          std::size_t dim, std::span<const std::int64_t> rows,
                          std::span<Real> out);
void cosine_scores_parallel(std::span<const Real> query, const Real* matrix,
                            std::size_t dim, std::span<const std::int64_t> rows,
                            std::span<Real> out);

/// Element-wise mean of the selected rows.
Vec mean_rows_serial(const Real* matrix, std::size_t dim,
                     std::span<const std::int64_t> rows);

/// Worker count honoured by every parallel kernel (0 = OpenMP default).
void set_threads(int n);
int threads();

}  // namespace citetime::kernels

#endif  // CITETIME_KERNELS_HPP
