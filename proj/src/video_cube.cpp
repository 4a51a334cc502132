#include "cake/video_cube.hpp"

#include <string>

#include "cake/rng.hpp"

namespace cake {

VideoCube make_scene_cube(const SamplingGeometry& g) {
  return VideoCube(CubeKind::Scene, g.n1, g.n2, g.N, 1);
}

VideoCube make_measurement_cube(const SamplingGeometry& g) {
  return VideoCube(CubeKind::Measurement, g.m1, g.m2, g.M, g.B);
}

static void require_shape(const VideoCube& c, int rows, int cols, int frames,
                          const char* what) {
  if (c.rows != rows || c.cols != cols || c.frames != frames)
    throw DimensionError(std::string(what) + " cube shape (" +
                         std::to_string(c.frames) + "," +
                         std::to_string(c.rows) + "," + std::to_string(c.cols) +
                         ") does not match geometry (" +
                         std::to_string(frames) + "," + std::to_string(rows) +
                         "," + std::to_string(cols) + ")");
}

void require_scene_shape(const VideoCube& c, const SamplingGeometry& g) {
  require_shape(c, g.n1, g.n2, g.N, "scene");
}

void require_measurement_shape(const VideoCube& c, const SamplingGeometry& g) {
  require_shape(c, g.m1, g.m2, g.M, "measurement");
}

void add_noise(VideoCube& cube, const NoiseModel& model) {
  if (model.kind == NoiseModel::Kind::None) return;
  if (model.sigma < 0.0)
    throw DimensionError("noise sigma must be non-negative");
  if (model.sigma == 0.0) return;
  Rng rng(model.seed);
  for (auto& v : cube.data) v += model.sigma * rng.normal();
}

}  // namespace cake
