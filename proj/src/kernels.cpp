#include "citetime/kernels.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace citetime::kernels {

namespace {
int g_threads = 0;
}

void set_threads(int n) { g_threads = n < 0 ? 0 : n; }

int threads() {
#ifdef _OPENMP
  return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

Real cosine(const Real* a, const Real* b, std::size_t n, bool* degenerate) {
  Real ab = dot(a, b, n);
  Real aa = dot(a, a, n);
  Real bb = dot(b, b, n);
  if (aa == 0 || bb == 0) {
    if (degenerate) *degenerate = true;
    return 0;
  }
  if (degenerate) *degenerate = false;
  Real c = ab / (std::sqrt(aa) * std::sqrt(bb));
  // rounding can push |c| a hair past 1
  if (c > 1) c = 1;
  if (c < -1) c = -1;
  return c;
}

void cosine_scores_serial(std::span<const Real> query, const Real* matrix,
                          std::size_t dim, std::span<const std::int64_t> rows,
                          std::span<Real> out) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[i] = rows[i] < 0 ? std::numeric_limits<Real>::quiet_NaN()
                         : cosine(query.data(),
                                  matrix + static_cast<std::size_t>(rows[i]) * dim, dim);
  }
}

void cosine_scores_parallel(std::span<const Real> query, const Real* matrix,
                            std::size_t dim, std::span<const std::int64_t> rows,
                            std::span<Real> out) {
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static) num_threads(threads()) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = rows[i] < 0 ? std::numeric_limits<Real>::quiet_NaN()
                         : cosine(query.data(),
                                  matrix + static_cast<std::size_t>(rows[i]) * dim, dim);
  }
}

Vec mean_rows_serial(const Real* matrix, std::size_t dim,
                     std::span<const std::int64_t> rows) {
  Vec out(dim, 0);
  if (rows.empty()) return out;
  for (auto r : rows) axpy(1, matrix + static_cast<std::size_t>(r) * dim, out.data(), dim);
  for (auto& v : out) v /= static_cast<Real>(rows.size());
  return out;
}

}  // namespace citetime::kernels
