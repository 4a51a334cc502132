#include "cake/parallel.hpp"

#include <algorithm>

namespace cake {

namespace {
int g_threads = 0;
}

void set_num_threads(int n) {
  g_threads = n < 0 ? 0 : n;
#ifdef _OPENMP
  if (g_threads > 0) omp_set_num_threads(g_threads);
#endif
}

int num_threads() {
#ifdef _OPENMP
  return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

// Chunk count is fixed (independent of the thread count) so the final serial
// accumulation always adds the same partials in the same order.
static constexpr std::size_t kChunks = 64;

double det_dot(const double* a, const double* b, std::size_t n) {
  if (n == 0) return 0.0;
  const std::size_t chunk = (n + kChunks - 1) / kChunks;
  double partial[kChunks] = {0.0};
  const int used = static_cast<int>((n + chunk - 1) / chunk);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int c = 0; c < used; ++c) {
    const std::size_t lo = std::size_t(c) * chunk;
    const std::size_t hi = std::min(lo + chunk, n);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[c] = s;
  }
  double total = 0.0;
  for (int c = 0; c < used; ++c) total += partial[c];
  return total;
}

double det_norm_sq(const double* a, std::size_t n) { return det_dot(a, a, n); }

double det_sum(const double* a, std::size_t n) {
  if (n == 0) return 0.0;
  const std::size_t chunk = (n + kChunks - 1) / kChunks;
  double partial[kChunks] = {0.0};
  const int used = static_cast<int>((n + chunk - 1) / chunk);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int c = 0; c < used; ++c) {
    const std::size_t lo = std::size_t(c) * chunk;
    const std::size_t hi = std::min(lo + chunk, n);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i];
    partial[c] = s;
  }
  double total = 0.0;
  for (int c = 0; c < used; ++c) total += partial[c];
  return total;
}

}  // namespace cake
