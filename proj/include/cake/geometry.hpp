#ifndef CAKE_GEOMETRY_HPP
#define CAKE_GEOMETRY_HPP

#include <cstdint>

#include "cake/errors.hpp"

namespace cake {

// Single source of truth for all shape arithmetic of an acquisition:
// n1 x n2 frames at the reconstruction rate N, measured as M = N/B frames of
// m1 x m2 = (n1/d1) x (n2/d2) pixels.
struct SamplingGeometry {
  int n1 = 0, n2 = 0;  // scene frame size (rows, cols)
  int N = 0;           // high-rate frame count
  int d1 = 1, d2 = 1;  // spatial downsampling factors per axis
  int B = 1;           // exposure block length (frames per measurement)
  int m1 = 0, m2 = 0;  // measurement frame size
  int M = 0;           // measurement frame count

  std::int64_t n() const { return std::int64_t(n1) * n2; }
  std::int64_t m() const { return std::int64_t(m1) * m2; }
  int d() const { return d1 * d2; }
  std::int64_t scene_size() const { return n() * N; }
  std::int64_t measurement_size() const { return m() * M; }
  double compression_ratio() const {
    return double(measurement_size()) / double(scene_size());
  }

  bool operator==(const SamplingGeometry&) const = default;
};

SamplingGeometry make_geometry(int n1, int n2, int N, int d1, int d2, int B);

}  // namespace cake

#endif
