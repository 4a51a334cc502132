#ifndef CAKE_OPERATORS_HPP
#define CAKE_OPERATORS_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "cake/masks.hpp"
#include "cake/video_cube.hpp"

namespace cake {

// --- frame-level building blocks ------------------------------------------

// Circular 2-D convolution via the FFT (the BCCB matrix-vector product).
void bccb_convolve(const double* img, const double* mask, double* out,
                   int rows, int cols);

// Keeps one sample per d1 x d2 block at offset (p1, p2) inside the block.
void subsample(const double* img, int n1, int n2, int d1, int d2, int p1,
               int p2, double* out);
void subsample_adjoint(const double* coarse, int n1, int n2, int d1, int d2,
                       int p1, int p2, double* out);

// Sums each d1 x d2 block; the adjoint replicates values over their blocks.
void integrate_downsample(const double* img, int n1, int n2, int d1, int d2,
                          double* out);
void integrate_adjoint(const double* coarse, int n1, int n2, int d1, int d2,
                       double* out);

// Pointwise sign (or {0,1}) modulation followed by integration downsampling.
void random_demod_downsample(const double* img, const double* signs, int n1,
                             int n2, int d1, int d2, double* out);
void random_demod_adjoint(const double* coarse, const double* signs, int n1,
                          int n2, int d1, int d2, double* out);

enum class Downsampler : std::uint8_t {
  Subsample = 0,
  Integrate = 1,
  RandomDemod = 2,        // signs in {-1,+1}
  RandomDemodBinary = 3,  // signs in {0,1}
};

// --- the sensing operator --------------------------------------------------

// A : scene (N frames of n1 x n2) -> measurements (M frames of m1 x m2).
// Per frame, convolve with h_t and downsample; each measurement frame sums
// its B-frame exposure block left to right (fixed order, bit-reproducible).
//
// Subsampling uses offset (d1-1, d2-1) inside each block: the position the
// closed-form dual-scale coarse recovery is aligned to.
class CakeOperator {
 public:
  CakeOperator(const MaskSequence& masks, Downsampler kind,
               std::uint64_t sign_seed = 0);

  const SamplingGeometry& geometry() const { return geo_; }
  Downsampler downsampler() const { return kind_; }
  const std::vector<double>& signs() const { return signs_; }

  VideoCube forward(const VideoCube& scene,
                    const NoiseModel& noise = NoiseModel::none()) const;
  VideoCube adjoint(const VideoCube& measurement) const;

  // Raw-buffer versions used in solver hot paths (noiseless forward).
  void forward_into(const double* scene, double* measurement) const;
  void adjoint_into(const double* measurement, double* scene) const;

  // Power-iteration estimate of ||A||^2 (largest eigenvalue of A^T A).
  double norm_sq_estimate(int iters, std::uint64_t seed) const;

 private:
  SamplingGeometry geo_;
  Downsampler kind_;
  int p1_, p2_;  // subsampling offset within each block
  std::vector<std::vector<std::complex<double>>> spectra_;  // F h_t per frame
  std::vector<double> signs_;
};

// --- temporal difference frames -------------------------------------------

// theta_1 = f_1, theta_t = f_t - f_{t-1}; inverse is the running sum
// f_t = sum_{i<=t} theta_i. Mutual inverses on any cube.
void frames_to_diff(const double* f, double* theta, int frames,
                    std::int64_t frame_size);
void diff_to_frames(const double* theta, double* f, int frames,
                    std::int64_t frame_size);
VideoCube frames_to_diff(const VideoCube& f);
VideoCube diff_to_frames(const VideoCube& theta);
// Adjoint of diff_to_frames' running sum: out_t = sum_{s >= t} x_s.
void suffix_sum_frames(const double* x, double* out, int frames,
                       std::int64_t frame_size);

// --- total-variation stencils ----------------------------------------------

// Circular first differences along rows and columns.
void tv_gradient(const double* img, int rows, int cols, double* grad_r,
                 double* grad_c);
// Adjoint of tv_gradient (the negative divergence).
void tv_gradient_adjoint(const double* grad_r, const double* grad_c, int rows,
                         int cols, double* out);
// Isotropic TV: sum over pixels of sqrt(grad_r^2 + grad_c^2).
double tv_isotropic(const double* img, int rows, int cols);

}  // namespace cake

#endif
