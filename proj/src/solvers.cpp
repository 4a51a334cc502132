#include "cake/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "cake/fft.hpp"
#include "cake/parallel.hpp"
#include "cake/rng.hpp"

namespace cake {

double power_iter_norm_sq(const LinOp& op, int iters, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(op.in_size), y(op.out_size), z(op.in_size);
  for (double& v : x) v = rng.normal();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    const double nx = std::sqrt(det_norm_sq(x.data(), x.size()));
    if (nx == 0.0) break;
    for (double& v : x) v /= nx;
    op.fwd(x.data(), y.data());
    op.adj(y.data(), z.data());
    lambda = det_dot(x.data(), z.data(), x.size());
    std::swap(x, z);
  }
  return lambda;
}

// --- TV prox -----------------------------------------------------------------

void prox_tv(const double* v, int rows, int cols, double lambda, int max_iters,
             double gap_tol, std::vector<double>& dual_r,
             std::vector<double>& dual_c, double* out) {
  const std::size_t count = std::size_t(rows) * cols;
  if (lambda <= 0.0) {
    std::memcpy(out, v, sizeof(double) * count);
    return;
  }
  if (dual_r.size() != count) dual_r.assign(count, 0.0);
  if (dual_c.size() != count) dual_c.assign(count, 0.0);

  // accelerated projected gradient on the dual, warm-started
  std::vector<double> pr = dual_r, pc = dual_c;      // iterate
  std::vector<double> qr = dual_r, qc = dual_c;      // momentum point
  std::vector<double> w(count), gr(count), gc(count);
  const double step = 1.0 / (8.0 * lambda);
  double tk = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    // w = v - lambda * G^T q ; gradient of the dual is -lambda * G w
    tv_gradient_adjoint(qr.data(), qc.data(), rows, cols, w.data());
    for (std::size_t i = 0; i < count; ++i) w[i] = v[i] - lambda * w[i];
    tv_gradient(w.data(), rows, cols, gr.data(), gc.data());
    const double tnext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    const double mom = (tk - 1.0) / tnext;
    for (std::size_t i = 0; i < count; ++i) {
      double nr = qr[i] + step * gr[i];
      double nc = qc[i] + step * gc[i];
      const double mag = std::sqrt(nr * nr + nc * nc);
      if (mag > 1.0) {
        nr /= mag;
        nc /= mag;
      }
      qr[i] = nr + mom * (nr - pr[i]);
      qc[i] = nc + mom * (nc - pc[i]);
      pr[i] = nr;
      pc[i] = nc;
    }
    tk = tnext;
    if (gap_tol > 0.0 && (it & 3) == 3) {
      tv_gradient_adjoint(pr.data(), pc.data(), rows, cols, w.data());
      for (std::size_t i = 0; i < count; ++i) w[i] = v[i] - lambda * w[i];
      double primal = lambda * tv_isotropic(w.data(), rows, cols);
      double quad = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        const double d = w[i] - v[i];
        quad += d * d;
      }
      // gap = P(z) - D(p) = lambda*TV(z) + <z-v, z>
      double cross = 0.0;
      for (std::size_t i = 0; i < count; ++i) cross += (w[i] - v[i]) * w[i];
      const double gap = primal + cross;
      if (std::fabs(gap) <= gap_tol * std::max(1.0, primal + 0.5 * quad)) break;
    }
  }
  tv_gradient_adjoint(pr.data(), pc.data(), rows, cols, w.data());
  for (std::size_t i = 0; i < count; ++i) out[i] = v[i] - lambda * w[i];
  dual_r = pr;
  dual_c = pc;
}

// --- coarse recovery -----------------------------------------------------------

VideoCube coarse_estimate(const VideoCube& measurement,
                          const MaskSequence& masks) {
  if (masks.family != MaskFamily::Dsm)
    throw UnsupportedMaskError(
        "coarse_estimate: masks are not dual-scale (no stored sigma)");
  const SamplingGeometry& g = masks.geometry;
  require_measurement_shape(measurement, g);
  const double alpha = masks.dsm.alpha;
  VideoCube out = make_measurement_cube(g);
  const double scale = 1.0 / (alpha * g.d() * g.B);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int k = 0; k < g.M; ++k) {
    auto spec = fft::forward_2d(measurement.frame(k), g.m1, g.m2);
    const auto& sigma = masks.dsm.sigma[k];
    for (std::int64_t i = 0; i < g.m(); ++i)
      spec[i] *= std::conj(sigma[i]) * scale;
    fft::inverse_2d_real(std::move(spec), g.m1, g.m2, out.frame(k));
  }
  return out;
}

// --- TV + l1 difference-frame recovery ----------------------------------------

namespace {

double soft_threshold_frame(const double* v, double thr, double* out,
                            std::int64_t count) {
  double l1 = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const double a = std::fabs(v[i]) - thr;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
    l1 += std::fabs(out[i]);
  }
  return l1;
}

}  // namespace

std::pair<VideoCube, SolverReport> reconstruct_tv_l1(
    const CakeOperator& op, const VideoCube& measurement,
    const TvL1Params& params) {
  const auto t_start = std::chrono::steady_clock::now();
  const SamplingGeometry& g = op.geometry();
  require_measurement_shape(measurement, g);

  const std::int64_t n = g.n();
  const std::size_t nN = std::size_t(g.scene_size());
  const std::size_t mM = std::size_t(g.measurement_size());
  const double* y = measurement.data.data();

  // theta-space forward/adjoint of the composite A (L (x) I_n)
  std::vector<double> fbuf(nN);
  auto fwd_AL = [&](const double* theta, double* out) {
    diff_to_frames(theta, fbuf.data(), g.N, n);
    op.forward_into(fbuf.data(), out);
  };
  std::vector<double> abuf(nN);
  auto adj_AL = [&](const double* r, double* out) {
    op.adjoint_into(r, abuf.data());
    suffix_sum_frames(abuf.data(), out, g.N, n);
  };

  LinOp composite{std::int64_t(nN), std::int64_t(mM),
                  [&](const double* x, double* o) { fwd_AL(x, o); },
                  [&](const double* x, double* o) { adj_AL(x, o); }};
  double lip = power_iter_norm_sq(composite, params.power_iters, 0x5eedULL);
  if (!(lip > 0.0)) lip = 1.0;

  // theta0 = frames_to_diff(A^T y / ||A||^2)
  const double norm_a_sq =
      op.norm_sq_estimate(params.power_iters, 0x5eedULL + 1);
  std::vector<double> theta(nN);
  op.adjoint_into(y, abuf.data());
  const double init_scale = norm_a_sq > 0.0 ? 1.0 / norm_a_sq : 1.0;
  for (std::size_t i = 0; i < nN; ++i) abuf[i] *= init_scale;
  frames_to_diff(abuf.data(), theta.data(), g.N, n);

  std::vector<double> resid(mM);
  auto smooth_value = [&](const double* th) {
    fwd_AL(th, resid.data());
    for (std::size_t i = 0; i < mM; ++i) resid[i] -= y[i];
    return 0.5 * det_norm_sq(resid.data(), mM);
  };
  std::vector<double> tv_dr, tv_dc;  // warm-started TV duals
  auto penalty_value = [&](const double* th) {
    double p = params.tau_tv * tv_isotropic(th, g.n1, g.n2);
    for (int t = 1; t < g.N; ++t) {
      const double* ft = th + std::size_t(t) * n;
      double l1 = 0.0;
      for (std::int64_t i = 0; i < n; ++i) l1 += std::fabs(ft[i]);
      p += params.tau_l1 * l1;
    }
    return p;
  };

  std::vector<double> x = theta, xprev = theta, v = theta, z(nN), grad(nN),
                      cand(nN);
  double fx = smooth_value(x.data()) + penalty_value(x.data());
  SolverReport report;
  report.objective_trace.push_back(fx);

  double tk = 1.0;
  int iter = 0;
  bool converged = false;
  for (iter = 1; iter <= params.max_iters; ++iter) {
    // gradient at the momentum point
    fwd_AL(v.data(), resid.data());
    for (std::size_t i = 0; i < mM; ++i) resid[i] -= y[i];
    const double gv = 0.5 * det_norm_sq(resid.data(), mM);
    adj_AL(resid.data(), grad.data());

    double gz = 0.0;
    while (true) {
      const double step = 1.0 / lip;
      for (std::size_t i = 0; i < nN; ++i) cand[i] = v[i] - step * grad[i];
      // prox: TV on frame 1, soft threshold on the rest
      prox_tv(cand.data(), g.n1, g.n2, params.tau_tv * step,
              params.tv_inner_iters, params.tv_inner_tol, tv_dr, tv_dc,
              z.data());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (int t = 1; t < g.N; ++t)
        soft_threshold_frame(cand.data() + std::size_t(t) * n,
                             params.tau_l1 * step,
                             z.data() + std::size_t(t) * n, n);
      gz = smooth_value(z.data());
      double lin = 0.0, quad = 0.0;
      for (std::size_t i = 0; i < nN; ++i) {
        const double d = z[i] - v[i];
        lin += grad[i] * d;
        quad += d * d;
      }
      const double bound = gv + lin + 0.5 * lip * quad;
      if (gz <= bound + 1e-12 * std::fabs(bound) + 1e-300) break;
      lip *= params.backtrack_factor;
      if (!std::isfinite(lip) || lip > 1e300)
        throw DivergenceError(
            "tv_l1: backtracking diverged, Lipschitz estimate " +
            std::to_string(lip));
    }

    const double fz = gz + penalty_value(z.data());
    if (!std::isfinite(fz))
      throw DivergenceError("tv_l1: non-finite objective at iteration " +
                            std::to_string(iter) + " (step size " +
                            std::to_string(1.0 / lip) + ")");

    // monotone step: keep the best of {z, x}
    xprev.swap(x);
    double fnew;
    if (fz <= fx) {
      x = z;
      fnew = fz;
    } else {
      x = xprev;  // x_k = x_{k-1}
      fnew = fx;
    }
    const double tnext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    for (std::size_t i = 0; i < nN; ++i)
      v[i] = x[i] + (tk / tnext) * (z[i] - x[i]) +
             ((tk - 1.0) / tnext) * (x[i] - xprev[i]);
    tk = tnext;
    fx = fnew;
    report.objective_trace.push_back(fx);

    const int w = params.obj_window;
    if (int(report.objective_trace.size()) > w) {
      const double base =
          report.objective_trace[report.objective_trace.size() - 1 - w];
      if (base - fx <= params.obj_tol * std::max(1.0, std::fabs(fx))) {
        converged = true;
        break;
      }
    }
  }
  report.iterations = int(report.objective_trace.size()) - 1;
  report.converged = converged;
  report.final_objective = fx;

  fwd_AL(x.data(), resid.data());
  for (std::size_t i = 0; i < mM; ++i) resid[i] -= y[i];
  report.data_residual = std::sqrt(det_norm_sq(resid.data(), mM));

  VideoCube f = make_scene_cube(g);
  diff_to_frames(x.data(), f.data.data(), g.N, n);
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t_start)
          .count();
  return {std::move(f), std::move(report)};
}

// --- baselines -----------------------------------------------------------------

VideoCube conventional_baseline(const VideoCube& scene,
                                const SamplingGeometry& g,
                                const NoiseModel& noise) {
  require_scene_shape(scene, g);
  VideoCube coarse = make_measurement_cube(g);
  std::vector<double> block(g.m());
  const double scale = 1.0 / (double(g.d()) * g.B);
  for (int k = 0; k < g.M; ++k) {
    double* out = coarse.frame(k);
    for (int t = k * g.B; t < (k + 1) * g.B; ++t) {
      integrate_downsample(scene.frame(t), g.n1, g.n2, g.d1, g.d2,
                           block.data());
      for (std::int64_t i = 0; i < g.m(); ++i) out[i] += block[i];
    }
    for (std::int64_t i = 0; i < g.m(); ++i) out[i] *= scale;
  }
  add_noise(coarse, noise);
  return coarse;
}

VideoCube spline_baseline(const VideoCube& coarse, const SamplingGeometry& g) {
  return upsample_coarse(coarse, g);
}

// --- report serialization --------------------------------------------------------

std::string SolverReport::to_log() const {
  std::string s;
  char line[64];
  for (std::size_t i = 0; i < objective_trace.size(); ++i) {
    std::snprintf(line, sizeof line, "iter %zu objective %.12e\n", i,
                  objective_trace[i]);
    s += line;
  }
  return s;
}

std::string SolverReport::summary() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "iterations=%d\n"
                "objective=%.12e\n"
                "stacked_objective=%.12e\n"
                "data_residual=%.12e\n"
                "flow_residual=%.12e\n"
                "converged=%d\n"
                "wall_time_ms=%.3f\n"
                "rmse_vs_truth=%.6f\n",
                iterations, final_objective, stacked_objective, data_residual,
                flow_residual, converged ? 1 : 0, wall_time_ms, rmse_vs_truth);
  return buf;
}

}  // namespace cake
