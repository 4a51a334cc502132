#ifndef CAKE_PARALLEL_HPP
#define CAKE_PARALLEL_HPP

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cake {

// Thread-count control for the OpenMP kernels. 0 means "whatever the runtime
// gives us". Reductions below are fixed-order, so results are bit-identical
// for any thread count.
void set_num_threads(int n);
int num_threads();

// Dot product with a thread-count-independent summation order: fixed-size
// chunk partials computed in parallel, then summed left to right.
double det_dot(const double* a, const double* b, std::size_t n);
double det_norm_sq(const double* a, std::size_t n);
double det_sum(const double* a, std::size_t n);

}  // namespace cake

#endif
