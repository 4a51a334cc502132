#include "cake/operators.hpp"

#include <cmath>
#include <cstring>

#include "cake/fft.hpp"
#include "cake/parallel.hpp"
#include "cake/rng.hpp"

namespace cake {

void bccb_convolve(const double* img, const double* mask, double* out,
                   int rows, int cols) {
  fft::convolve_2d(img, mask, out, rows, cols);
}

void subsample(const double* img, int n1, int n2, int d1, int d2, int p1,
               int p2, double* out) {
  if (p1 < 0 || p1 >= d1 || p2 < 0 || p2 >= d2)
    throw DimensionError("subsample: phase outside block");
  const int m1 = n1 / d1, m2 = n2 / d2;
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j)
      out[i * m2 + j] = img[(i * d1 + p1) * n2 + (j * d2 + p2)];
}

void subsample_adjoint(const double* coarse, int n1, int n2, int d1, int d2,
                       int p1, int p2, double* out) {
  if (p1 < 0 || p1 >= d1 || p2 < 0 || p2 >= d2)
    throw DimensionError("subsample_adjoint: phase outside block");
  const int m1 = n1 / d1, m2 = n2 / d2;
  std::memset(out, 0, sizeof(double) * std::size_t(n1) * n2);
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j)
      out[(i * d1 + p1) * n2 + (j * d2 + p2)] = coarse[i * m2 + j];
}

void integrate_downsample(const double* img, int n1, int n2, int d1, int d2,
                          double* out) {
  const int m1 = n1 / d1, m2 = n2 / d2;
  for (int i = 0; i < m1; ++i) {
    for (int j = 0; j < m2; ++j) {
      double s = 0.0;
      for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) s += img[(i * d1 + a) * n2 + (j * d2 + b)];
      out[i * m2 + j] = s;
    }
  }
}

void integrate_adjoint(const double* coarse, int n1, int n2, int d1, int d2,
                       double* out) {
  const int m1 = n1 / d1, m2 = n2 / d2;
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j) {
      const double v = coarse[i * m2 + j];
      for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) out[(i * d1 + a) * n2 + (j * d2 + b)] = v;
    }
}

void random_demod_downsample(const double* img, const double* signs, int n1,
                             int n2, int d1, int d2, double* out) {
  const int m1 = n1 / d1, m2 = n2 / d2;
  for (int i = 0; i < m1; ++i) {
    for (int j = 0; j < m2; ++j) {
      double s = 0.0;
      for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) {
          const int idx = (i * d1 + a) * n2 + (j * d2 + b);
          s += signs[idx] * img[idx];
        }
      out[i * m2 + j] = s;
    }
  }
}

void random_demod_adjoint(const double* coarse, const double* signs, int n1,
                          int n2, int d1, int d2, double* out) {
  const int m1 = n1 / d1, m2 = n2 / d2;
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j) {
      const double v = coarse[i * m2 + j];
      for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) {
          const int idx = (i * d1 + a) * n2 + (j * d2 + b);
          out[idx] = signs[idx] * v;
        }
    }
}

// --- CakeOperator ------------------------------------------------------------

CakeOperator::CakeOperator(const MaskSequence& masks, Downsampler kind,
                           std::uint64_t sign_seed)
    : geo_(masks.geometry), kind_(kind), p1_(geo_.d1 - 1), p2_(geo_.d2 - 1) {
  spectra_.resize(geo_.N);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int t = 0; t < geo_.N; ++t)
    spectra_[t] = fft::forward_2d(masks.mask(t), geo_.n1, geo_.n2);

  if (kind_ == Downsampler::RandomDemod ||
      kind_ == Downsampler::RandomDemodBinary) {
    Rng rng(sign_seed);
    signs_.resize(geo_.n());
    for (double& s : signs_)
      s = (kind_ == Downsampler::RandomDemod) ? double(rng.sign())
                                              : double(rng.bits() & 1u);
  }
}

void CakeOperator::forward_into(const double* scene, double* meas) const {
  const std::int64_t n = geo_.n(), m = geo_.m();
  std::vector<double> down(std::size_t(geo_.N) * m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int t = 0; t < geo_.N; ++t) {
    thread_local std::vector<fft::cplx> spec;
    thread_local std::vector<double> conv;
    spec.resize(n);
    conv.resize(n);
    fft::forward_2d_into(scene + std::size_t(t) * n, geo_.n1, geo_.n2,
                         spec.data());
    const fft::cplx* mask_spec = spectra_[t].data();
    double* sd = reinterpret_cast<double*>(spec.data());
    const double* md = reinterpret_cast<const double*>(mask_spec);
    for (std::int64_t i = 0; i < n; ++i) {
      const double ar = sd[2 * i], ai = sd[2 * i + 1];
      const double br = md[2 * i], bi = md[2 * i + 1];
      sd[2 * i] = ar * br - ai * bi;
      sd[2 * i + 1] = ar * bi + ai * br;
    }
    fft::inverse_2d_real_into(spec.data(), geo_.n1, geo_.n2, conv.data());
    double* out = down.data() + std::size_t(t) * m;
    switch (kind_) {
      case Downsampler::Subsample:
        subsample(conv.data(), geo_.n1, geo_.n2, geo_.d1, geo_.d2, p1_, p2_,
                  out);
        break;
      case Downsampler::Integrate:
        integrate_downsample(conv.data(), geo_.n1, geo_.n2, geo_.d1, geo_.d2,
                             out);
        break;
      case Downsampler::RandomDemod:
      case Downsampler::RandomDemodBinary:
        random_demod_downsample(conv.data(), signs_.data(), geo_.n1, geo_.n2,
                                geo_.d1, geo_.d2, out);
        break;
    }
  }
  // fixed left-to-right exposure sum per block
  for (int k = 0; k < geo_.M; ++k) {
    double* yk = meas + std::size_t(k) * m;
    std::memset(yk, 0, sizeof(double) * m);
    for (int t = k * geo_.B; t < (k + 1) * geo_.B; ++t) {
      const double* u = down.data() + std::size_t(t) * m;
      for (std::int64_t i = 0; i < m; ++i) yk[i] += u[i];
    }
  }
}

void CakeOperator::adjoint_into(const double* meas, double* scene) const {
  const std::int64_t n = geo_.n(), m = geo_.m();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int t = 0; t < geo_.N; ++t) {
    const int k = t / geo_.B;
    const double* yk = meas + std::size_t(k) * m;
    thread_local std::vector<double> up;
    up.resize(n);
    switch (kind_) {
      case Downsampler::Subsample:
        subsample_adjoint(yk, geo_.n1, geo_.n2, geo_.d1, geo_.d2, p1_, p2_,
                          up.data());
        break;
      case Downsampler::Integrate:
        integrate_adjoint(yk, geo_.n1, geo_.n2, geo_.d1, geo_.d2, up.data());
        break;
      case Downsampler::RandomDemod:
      case Downsampler::RandomDemodBinary:
        random_demod_adjoint(yk, signs_.data(), geo_.n1, geo_.n2, geo_.d1,
                             geo_.d2, up.data());
        break;
    }
    // correlate with h_t
    thread_local std::vector<fft::cplx> spec;
    spec.resize(n);
    fft::forward_2d_into(up.data(), geo_.n1, geo_.n2, spec.data());
    double* sd = reinterpret_cast<double*>(spec.data());
    const double* md = reinterpret_cast<const double*>(spectra_[t].data());
    for (std::int64_t i = 0; i < n; ++i) {
      const double ar = sd[2 * i], ai = sd[2 * i + 1];
      const double br = md[2 * i], bi = -md[2 * i + 1];  // conj
      sd[2 * i] = ar * br - ai * bi;
      sd[2 * i + 1] = ar * bi + ai * br;
    }
    fft::inverse_2d_real_into(spec.data(), geo_.n1, geo_.n2,
                              scene + std::size_t(t) * n);
  }
}

VideoCube CakeOperator::forward(const VideoCube& scene,
                                const NoiseModel& noise) const {
  require_scene_shape(scene, geo_);
  VideoCube y = make_measurement_cube(geo_);
  forward_into(scene.data.data(), y.data.data());
  add_noise(y, noise);
  return y;
}

VideoCube CakeOperator::adjoint(const VideoCube& measurement) const {
  require_measurement_shape(measurement, geo_);
  VideoCube f = make_scene_cube(geo_);
  adjoint_into(measurement.data.data(), f.data.data());
  return f;
}

double CakeOperator::norm_sq_estimate(int iters, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> x(geo_.scene_size());
  for (double& v : x) v = rng.normal();
  std::vector<double> y(geo_.measurement_size()), z(x.size());
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    const double nx = std::sqrt(det_norm_sq(x.data(), x.size()));
    if (nx == 0.0) break;
    for (auto& v : x) v /= nx;
    forward_into(x.data(), y.data());
    adjoint_into(y.data(), z.data());
    lambda = det_dot(x.data(), z.data(), x.size());
    std::swap(x, z);
  }
  return lambda;
}

// --- temporal difference frames ---------------------------------------------

void frames_to_diff(const double* f, double* theta, int frames,
                    std::int64_t frame_size) {
  std::memcpy(theta, f, sizeof(double) * frame_size);
  for (int t = frames - 1; t >= 1; --t) {
    const double* cur = f + std::size_t(t) * frame_size;
    const double* prev = f + std::size_t(t - 1) * frame_size;
    double* out = theta + std::size_t(t) * frame_size;
    for (std::int64_t i = 0; i < frame_size; ++i) out[i] = cur[i] - prev[i];
  }
}

void diff_to_frames(const double* theta, double* f, int frames,
                    std::int64_t frame_size) {
  std::memcpy(f, theta, sizeof(double) * frame_size);
  for (int t = 1; t < frames; ++t) {
    const double* d = theta + std::size_t(t) * frame_size;
    const double* prev = f + std::size_t(t - 1) * frame_size;
    double* out = f + std::size_t(t) * frame_size;
    for (std::int64_t i = 0; i < frame_size; ++i) out[i] = prev[i] + d[i];
  }
}

VideoCube frames_to_diff(const VideoCube& f) {
  VideoCube theta = f;
  frames_to_diff(f.data.data(), theta.data.data(), f.frames, f.frame_size());
  return theta;
}

VideoCube diff_to_frames(const VideoCube& theta) {
  VideoCube f = theta;
  diff_to_frames(theta.data.data(), f.data.data(), theta.frames,
                 theta.frame_size());
  return f;
}

void suffix_sum_frames(const double* x, double* out, int frames,
                       std::int64_t frame_size) {
  std::memcpy(out + std::size_t(frames - 1) * frame_size,
              x + std::size_t(frames - 1) * frame_size,
              sizeof(double) * frame_size);
  for (int t = frames - 2; t >= 0; --t) {
    const double* xt = x + std::size_t(t) * frame_size;
    const double* nxt = out + std::size_t(t + 1) * frame_size;
    double* o = out + std::size_t(t) * frame_size;
    for (std::int64_t i = 0; i < frame_size; ++i) o[i] = xt[i] + nxt[i];
  }
}

// --- total-variation stencils ------------------------------------------------

void tv_gradient(const double* img, int rows, int cols, double* grad_r,
                 double* grad_c) {
  for (int i = 0; i < rows; ++i) {
    const int in = (i + 1) % rows;
    for (int j = 0; j < cols; ++j) {
      const int jn = (j + 1) % cols;
      grad_r[i * cols + j] = img[in * cols + j] - img[i * cols + j];
      grad_c[i * cols + j] = img[i * cols + jn] - img[i * cols + j];
    }
  }
}

void tv_gradient_adjoint(const double* grad_r, const double* grad_c, int rows,
                         int cols, double* out) {
  for (int i = 0; i < rows; ++i) {
    const int ip = (i - 1 + rows) % rows;
    for (int j = 0; j < cols; ++j) {
      const int jp = (j - 1 + cols) % cols;
      out[i * cols + j] = grad_r[ip * cols + j] - grad_r[i * cols + j] +
                          grad_c[i * cols + jp] - grad_c[i * cols + j];
    }
  }
}

double tv_isotropic(const double* img, int rows, int cols) {
  double s = 0.0;
  for (int i = 0; i < rows; ++i) {
    const int in = (i + 1) % rows;
    for (int j = 0; j < cols; ++j) {
      const int jn = (j + 1) % cols;
      const double gr = img[in * cols + j] - img[i * cols + j];
      const double gc = img[i * cols + jn] - img[i * cols + j];
      s += std::sqrt(gr * gr + gc * gc);
    }
  }
  return s;
}

}  // namespace cake
