#include "cake/metrics.hpp"

#include <cmath>
#include <string>

namespace cake {

double rmse_percent(const VideoCube& estimate, const VideoCube& truth,
                    const RectRegion& roi, const FrameRange& range) {
  if (!estimate.same_shape(truth))
    throw DimensionError("rmse: estimate and truth shapes differ");
  if (roi.empty() || roi.r0 < 0 || roi.c0 < 0 ||
      roi.r0 + roi.height > truth.rows || roi.c0 + roi.width > truth.cols)
    throw DimensionError("rmse: roi outside frame bounds");
  if (range.begin < 0 || range.end > truth.frames || range.begin >= range.end)
    throw DimensionError("rmse: empty or out-of-range frame range [" +
                         std::to_string(range.begin) + "," +
                         std::to_string(range.end) + ")");

  double num = 0.0, den = 0.0;
  for (int t = range.begin; t < range.end; ++t) {
    for (int r = roi.r0; r < roi.r0 + roi.height; ++r) {
      for (int c = roi.c0; c < roi.c0 + roi.width; ++c) {
        const double e = estimate.at(t, r, c), g = truth.at(t, r, c);
        num += (e - g) * (e - g);
        den += g * g;
      }
    }
  }
  if (den == 0.0)
    throw NormalizationError("rmse: truth is identically zero on the ROI");
  return 100.0 * std::sqrt(num) / std::sqrt(den);
}

double rmse_percent(const VideoCube& estimate, const VideoCube& truth) {
  return rmse_percent(estimate, truth,
                      RectRegion{0, 0, truth.rows, truth.cols},
                      FrameRange::all(truth.frames));
}

}  // namespace cake
