#ifndef CAKE_SOLVERS_HPP
#define CAKE_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cake/flow.hpp"
#include "cake/masks.hpp"
#include "cake/operators.hpp"
#include "cake/video_cube.hpp"

namespace cake {

// Matrix-free linear map used by the iterative solvers.
struct LinOp {
  std::int64_t in_size = 0;
  std::int64_t out_size = 0;
  std::function<void(const double*, double*)> fwd;
  std::function<void(const double*, double*)> adj;
};

// Largest eigenvalue of Op^T Op by power iteration (seeded start vector).
double power_iter_norm_sq(const LinOp& op, int iters, std::uint64_t seed);

struct TvL1Params {
  double tau_tv = 1.0e-2;
  double tau_l1 = 2.0e-2;
  int max_iters = 500;
  double obj_tol = 1.0e-6;  // relative objective change over the window
  int obj_window = 5;
  double backtrack_factor = 2.0;  // step halving = Lipschitz doubling
  int power_iters = 50;
  int tv_inner_iters = 30;
  double tv_inner_tol = 1.0e-8;
};

struct FlowConstrainedParams {
  double eps_data = 4.3e-2;  // l2 ball on the data misfit
  double eps_flow = 4.3e3;   // l2 ball on the warp residuals
  int max_iters = 60;        // Pareto root-finding iterations
  double gap_tol = 1.0e-7;   // relative duality gap for the subproblems
  double root_tol = 1.0e-6;  // relative accuracy of the residual target
  int max_matvec = 40000;
  double feasibility_slack = 1.05;
  int wavelet_levels = 0;  // 0 = maximum depth
};

struct SolverReport {
  int iterations = 0;
  std::vector<double> objective_trace;  // length iterations + 1
  double final_objective = 0.0;
  double data_residual = 0.0;
  double flow_residual = 0.0;
  // objective of the stacked single-ball program at the sqrt(2)*eps1 radius,
  // before any feasibility tightening (flow-constrained solver only)
  double stacked_objective = 0.0;
  double wall_time_ms = 0.0;
  bool converged = false;
  double rmse_vs_truth = -1.0;  // filled by the harness when truth is known

  std::string to_log() const;    // line-delimited iteration log
  std::string summary() const;   // key=value block
};

// Proximal map of lambda * isotropic TV via an accelerated dual projected
// gradient. dual_r/dual_c are warm-start buffers (resized on first use).
void prox_tv(const double* v, int rows, int cols, double lambda, int max_iters,
             double gap_tol, std::vector<double>& dual_r,
             std::vector<double>& dual_c, double* out);

// Closed-form dual-scale coarse recovery: one size-m FFT correlation per
// measurement frame, scaled by 1/(alpha*d*B). Requires DSM masks.
VideoCube coarse_estimate(const VideoCube& measurement,
                          const MaskSequence& masks);

// Accelerated proximal gradient (monotone FISTA) on the difference-frame
// objective: 1/2 ||A L theta - y||^2 + tau_tv TV(theta_1)
//            + tau_l1 sum_{t>=2} ||theta_t||_1, returning f = L theta.
std::pair<VideoCube, SolverReport> reconstruct_tv_l1(
    const CakeOperator& op, const VideoCube& measurement,
    const TvL1Params& params);

// min ||W^T theta||_1 s.t. ||A L theta - y|| <= eps1, ||V L theta|| <= eps2,
// solved through the stacked single-ball reformulation by spectral projected
// gradient root finding on the Pareto curve, then tightened until both
// original constraints hold within feasibility_slack of their bounds.
std::pair<VideoCube, SolverReport> reconstruct_optical_flow(
    const CakeOperator& op, const VideoCube& measurement,
    const MotionOperator& motion, const FlowConstrainedParams& params);

// Conventional acquisition: plain averaging over d1 x d2 x B blocks
// (plus measurement noise), and its spline-interpolated reconstruction.
VideoCube conventional_baseline(const VideoCube& scene,
                                const SamplingGeometry& g,
                                const NoiseModel& noise);
VideoCube spline_baseline(const VideoCube& coarse, const SamplingGeometry& g);

// Basis-pursuit-denoise building block shared by the flow solver and tests:
// min ||c||_1 s.t. ||Op c - b||_2 <= target.
struct BpdnOptions {
  int max_root_iters = 60;
  double root_tol = 1.0e-6;
  double gap_tol = 1.0e-7;
  int max_matvec = 40000;
  int spg_memory = 10;
};
struct BpdnResult {
  std::vector<double> solution;
  double objective = 0.0;  // ||c||_1
  double residual = 0.0;
  int matvecs = 0;
  int root_iters = 0;
  bool converged = false;
  std::vector<double> objective_trace;
};
BpdnResult spg_bpdn(const LinOp& op, const double* b, double target,
                    const BpdnOptions& opts,
                    const std::vector<double>* warm_start = nullptr);

}  // namespace cake

#endif
