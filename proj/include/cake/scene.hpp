#ifndef CAKE_SCENE_HPP
#define CAKE_SCENE_HPP

#include <cstdint>
#include <vector>

#include "cake/video_cube.hpp"

namespace cake {

// Synthetic translating-objects scenes. Objects move linearly (pixels/frame),
// wrap circularly at the frame edges, and are rendered with area-weighted
// coverage so sub-pixel positions produce smooth intensity profiles.
struct SceneObject {
  enum class Kind : std::uint8_t { Rect = 0, Disc = 1 };
  Kind kind = Kind::Rect;
  double r0 = 0.0, c0 = 0.0;  // initial top-left (rect) or center (disc)
  double height = 1.0, width = 1.0;  // rect extent; disc uses `radius`
  double radius = 1.0;
  double vr = 0.0, vc = 0.0;  // velocity, pixels per frame
  double intensity = 1.0;
};

struct SceneSpec {
  enum class Background : std::uint8_t {
    None = 0,
    Constant = 1,
    Blobs = 2,
    Image = 3,
  };
  std::uint64_t seed = 0;
  Background background = Background::None;
  double bg_value = 0.0;   // Constant level
  int blob_count = 0;      // Blobs: number of smooth bumps
  double blob_amp = 0.0;   // Blobs: peak amplitude
  // Image: a static frame-sized picture, drifted circularly like the blobs
  std::vector<double> bg_image;
  int bg_rows = 0, bg_cols = 0;
  double bg_vr = 0.0, bg_vc = 0.0;  // background drift, pixels per frame
  std::vector<SceneObject> objects;
};

VideoCube synth_scene(const SceneSpec& spec, const SamplingGeometry& g);

}  // namespace cake

#endif
