#ifndef CAKE_METRICS_HPP
#define CAKE_METRICS_HPP

#include "cake/video_cube.hpp"

namespace cake {

struct FrameRange {
  int begin = 0;
  int end = 0;  // exclusive
  // Excludes the first and last exposure block when computing metrics.
  static FrameRange discount_blocks(int frames, int B, int blocks = 1) {
    return {blocks * B, frames - blocks * B};
  }
  static FrameRange all(int frames) { return {0, frames}; }
};

// 100 * ||estimate - truth||_2 / ||truth||_2 over the region of interest and
// frame range. Throws NormalizationError when the truth vanishes there.
double rmse_percent(const VideoCube& estimate, const VideoCube& truth,
                    const RectRegion& roi, const FrameRange& range);

double rmse_percent(const VideoCube& estimate, const VideoCube& truth);

}  // namespace cake

#endif
