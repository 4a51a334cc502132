#ifndef CAKE_REFERENCE_HPP
#define CAKE_REFERENCE_HPP

#include <vector>

namespace cake {
namespace ref {

// Serial reference kernels. These are direct, definition-level
// implementations (no FFT, no OpenMP) kept for testing the optimized paths
// and for the benchmark comparison; the direct convolution is O(n^2) per
// frame where the FFT path is O(n log n).

// out[i,j] = sum_{p,q} img[p,q] * kernel[(i-p) mod rows, (j-q) mod cols]
void direct_convolve_2d(const double* img, const double* kernel, double* out,
                        int rows, int cols);

// out[i,j] = sum_{p,q} img[p,q] * kernel[(p-i) mod rows, (q-j) mod cols]
void direct_correlate_2d(const double* img, const double* kernel, double* out,
                         int rows, int cols);

void direct_subsample(const double* img, int n1, int n2, int d1, int d2,
                      int p1, int p2, double* out);
void direct_integrate(const double* img, int n1, int n2, int d1, int d2,
                      double* out);

}  // namespace ref
}  // namespace cake

#endif
