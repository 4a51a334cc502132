#ifndef CAKE_VIDEO_CUBE_HPP
#define CAKE_VIDEO_CUBE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "cake/errors.hpp"
#include "cake/geometry.hpp"

namespace cake {

enum class CubeKind : std::uint8_t { Scene = 0, Measurement = 1 };

// An ordered stack of equally sized real frames. Scene cubes hold N frames of
// n1 x n2, measurement cubes M frames of m1 x m2; frame_rate_ratio carries B
// so a measurement cube knows how many scene frames each of its frames spans.
struct VideoCube {
  CubeKind kind = CubeKind::Scene;
  int rows = 0, cols = 0, frames = 0;
  int frame_rate_ratio = 1;
  std::vector<double> data;  // frames * rows * cols, row-major per frame

  VideoCube() = default;
  VideoCube(CubeKind k, int rows_, int cols_, int frames_, int ratio = 1)
      : kind(k),
        rows(rows_),
        cols(cols_),
        frames(frames_),
        frame_rate_ratio(ratio),
        data(std::size_t(rows_) * cols_ * frames_, 0.0) {
    if (rows_ <= 0 || cols_ <= 0 || frames_ <= 0)
      throw DimensionError("VideoCube: non-positive dimensions");
  }

  std::int64_t frame_size() const { return std::int64_t(rows) * cols; }
  std::int64_t size() const { return frame_size() * frames; }

  double* frame(int t) { return data.data() + std::size_t(t) * frame_size(); }
  const double* frame(int t) const {
    return data.data() + std::size_t(t) * frame_size();
  }
  std::span<double> frame_span(int t) {
    return {frame(t), std::size_t(frame_size())};
  }
  std::span<const double> frame_span(int t) const {
    return {frame(t), std::size_t(frame_size())};
  }

  double& at(int t, int r, int c) {
    return data[std::size_t(t) * frame_size() + std::size_t(r) * cols + c];
  }
  double at(int t, int r, int c) const {
    return data[std::size_t(t) * frame_size() + std::size_t(r) * cols + c];
  }

  bool same_shape(const VideoCube& o) const {
    return rows == o.rows && cols == o.cols && frames == o.frames;
  }
};

VideoCube make_scene_cube(const SamplingGeometry& g);
VideoCube make_measurement_cube(const SamplingGeometry& g);

// Shape checks that name the failing pair.
void require_scene_shape(const VideoCube& c, const SamplingGeometry& g);
void require_measurement_shape(const VideoCube& c, const SamplingGeometry& g);

struct NoiseModel {
  enum class Kind : std::uint8_t { None = 0, Gaussian = 1 };
  Kind kind = Kind::None;
  double sigma = 0.0;  // intensity units, >= 0
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double sigma, std::uint64_t seed) {
    NoiseModel m;
    m.kind = Kind::Gaussian;
    m.sigma = sigma;
    m.seed = seed;
    return m;
  }
};

// Adds noise in place according to the model (no-op for Kind::None).
void add_noise(VideoCube& cube, const NoiseModel& model);

struct RectRegion {
  int r0 = 0, c0 = 0, height = 0, width = 0;
  bool empty() const { return height <= 0 || width <= 0; }
};

}  // namespace cake

#endif
