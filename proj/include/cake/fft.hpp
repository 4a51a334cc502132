#ifndef CAKE_FFT_HPP
#define CAKE_FFT_HPP

#include <complex>
#include <vector>

namespace cake {
namespace fft {

using cplx = std::complex<double>;

// Unnormalized forward DFT, inverse carries the 1/n factor, so
// inverse(forward(x)) == x and forward(f conv h) = forward(f) .* forward(h).
// Radix-2 for powers of two, Bluestein otherwise. All sizes >= 1 accepted.
void transform(cplx* x, int n, bool inverse);

// Row-major 2-D transform (rows x cols), same convention per axis.
void transform_2d(cplx* x, int rows, int cols, bool inverse);

// Convenience wrappers for real-valued images.
std::vector<cplx> forward_2d(const double* img, int rows, int cols);
void inverse_2d_real(std::vector<cplx> spec, int rows, int cols, double* out);

// Allocation-free variants for hot loops: `spec` must hold rows*cols values
// and is clobbered by the inverse.
void forward_2d_into(const double* img, int rows, int cols, cplx* spec);
void inverse_2d_real_into(cplx* spec, int rows, int cols, double* out);

// out = circular 2-D convolution of img with kernel, via the 2-D DFT.
void convolve_2d(const double* img, const double* kernel, double* out,
                 int rows, int cols);

// Warms the internal plan cache for a size (optional; plans are created on
// first use and kept for the process lifetime).
void prepare(int n);

}  // namespace fft
}  // namespace cake

#endif
