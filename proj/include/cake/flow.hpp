#ifndef CAKE_FLOW_HPP
#define CAKE_FLOW_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cake/video_cube.hpp"

namespace cake {

// Per-pixel displacement between consecutive frames: v1 horizontal (columns),
// v2 vertical (rows), in pixels/frame, for each of the frames-1 transitions.
// Convention: prev(x) ~ next(x + v(x)).
struct FlowField {
  int rows = 0, cols = 0, transitions = 0;
  std::vector<double> v1, v2;  // transitions * rows * cols each

  double* v1_plane(int t) { return v1.data() + std::size_t(t) * rows * cols; }
  double* v2_plane(int t) { return v2.data() + std::size_t(t) * rows * cols; }
  const double* v1_plane(int t) const {
    return v1.data() + std::size_t(t) * rows * cols;
  }
  const double* v2_plane(int t) const {
    return v2.data() + std::size_t(t) * rows * cols;
  }
};

struct FlowParams {
  double lambda = 0.1;   // smoothness weight
  int iterations = 100;  // fixed-point sweeps per pyramid level
  int levels = 3;        // coarse-to-fine pyramid depth
};

// Multiscale Horn-Schunck on a frame pair. Returns zeros for constant
// (gradient-free) inputs. All boundary handling is circular.
void estimate_flow(const double* prev, const double* next, int rows, int cols,
                   const FlowParams& params, double* v1, double* v2);

// Flow for every consecutive pair of cube frames; transitions run in
// parallel.
FlowField estimate_flow_sequence(const VideoCube& cube,
                                 const FlowParams& params);

// Separable natural-cubic-spline interpolation of an M x m1 x m2 coarse cube
// up to the scene rate and resolution. Coarse samples sit at block centers;
// axes with a single sample are replicated.
VideoCube upsample_coarse(const VideoCube& coarse, const SamplingGeometry& g);

// Sparse warp stack V: row t computes bilinear-at-(x - v(x)) samples of
// frame t minus frame t+1, so applying V to a scene yields the stacked
// warp residuals. Rows of each warp matrix sum to 1.
class MotionOperator {
 public:
  explicit MotionOperator(const FlowField& flow);  // throws InvalidFlowError

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int in_frames() const { return transitions_ + 1; }
  int out_frames() const { return transitions_; }

  // out: transitions * rows * cols; f: (transitions+1) * rows * cols
  void apply(const double* f, double* out) const;
  void apply_adjoint(const double* r, double* out) const;

  // Applies only the warp of transition t (no subtraction).
  void warp(int t, const double* frame, double* out) const;

 private:
  int rows_ = 0, cols_ = 0, transitions_ = 0;
  std::vector<std::int32_t> idx_;  // 4 neighbors per pixel per transition
  std::vector<double> wgt_;        // matching bilinear weights
};

// "FLOW" container: 32-byte header (magic, u16 version, u16 dtype=0 float32,
// u32 rows, cols, transitions, u32 flags, 8 pad) then per-transition v1 and
// v2 planes as float32.
void write_flow(const FlowField& flow, const std::string& path);
FlowField read_flow(const std::string& path);

}  // namespace cake

#endif
