// Benchmark of the OpenMP kernels against the serial reference paths:
// per-frame convolution bank (FFT vs direct), full sensing forward/adjoint
// at 1 thread vs all threads, Horn-Schunck sweeps, and Gram trials.

#include <chrono>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "cake/flow.hpp"
#include "cake/masks.hpp"
#include "cake/operators.hpp"
#include "cake/parallel.hpp"
#include "cake/reference.hpp"
#include "cake/ripcheck.hpp"
#include "cake/rng.hpp"
#include "cake/scene.hpp"

using clock_type = std::chrono::steady_clock;

static double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm-up (plan caches, page faults)
  const auto t0 = clock_type::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

static void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-34s %12.3f %12.3f %9.2fx\n", name, serial_ms, parallel_ms,
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
}

int main(int argc, char** argv) {
  CLI::App app{"cake-bench: serial reference vs OpenMP kernels"};
  int size = 64;
  int frames = 32;
  int reps = 5;
  int threads = 0;
  app.add_option("--size", size, "frame edge length (default 64)");
  app.add_option("--frames", frames, "frame count (default 32)");
  app.add_option("--reps", reps, "repetitions per timing (default 5)");
  app.add_option("--threads", threads, "parallel thread count (0=auto)");
  CLI11_PARSE(app, argc, argv);

  const auto g = cake::make_geometry(size, size, frames, 2, 2, 4);
  cake::SceneSpec spec;
  spec.seed = 3;
  spec.background = cake::SceneSpec::Background::Blobs;
  spec.blob_count = 6;
  spec.blob_amp = 0.4;
  cake::SceneObject obj;
  obj.kind = cake::SceneObject::Kind::Rect;
  obj.r0 = size / 4.0;
  obj.c0 = size / 4.0;
  obj.height = size / 6.0;
  obj.width = size / 6.0;
  obj.vr = 0.6;
  obj.vc = 0.8;
  obj.intensity = 0.6;
  spec.objects = {obj};
  const cake::VideoCube scene = cake::synth_scene(spec, g);

  const cake::MaskSequence masks = cake::gen_rademacher(g, 11);
  const cake::CakeOperator op(masks, cake::Downsampler::Subsample);
  cake::VideoCube meas = cake::make_measurement_cube(g);
  cake::VideoCube back = cake::make_scene_cube(g);

  std::printf("frames %dx%dx%d, threads: %d\n", frames, size, size,
              threads > 0 ? threads : cake::num_threads());
  std::printf("%-34s %12s %12s %9s\n", "kernel", "serial ms", "parallel ms",
              "speedup");

  // direct (O(n^2)) reference convolution vs the FFT path, one frame
  {
    std::vector<double> out(g.n());
    const double* img = scene.frame(0);
    const double* h = masks.mask(0);
    const double direct = time_ms(
        [&] { cake::ref::direct_convolve_2d(img, h, out.data(), g.n1, g.n2); },
        1);
    const double fft = time_ms(
        [&] { cake::bccb_convolve(img, h, out.data(), g.n1, g.n2); }, reps);
    row("convolve: direct vs FFT (1 frame)", direct, fft);
  }

  // sensing forward/adjoint: 1 thread vs all threads
  {
    cake::set_num_threads(1);
    const double fwd1 = time_ms(
        [&] { op.forward_into(scene.data.data(), meas.data.data()); }, reps);
    const double adj1 = time_ms(
        [&] { op.adjoint_into(meas.data.data(), back.data.data()); }, reps);
    cake::set_num_threads(threads);
    const double fwdp = time_ms(
        [&] { op.forward_into(scene.data.data(), meas.data.data()); }, reps);
    const double adjp = time_ms(
        [&] { op.adjoint_into(meas.data.data(), back.data.data()); }, reps);
    row("sensing forward (N frames)", fwd1, fwdp);
    row("sensing adjoint (N frames)", adj1, adjp);
  }

  // Horn-Schunck flow between two frames
  {
    std::vector<double> v1(g.n()), v2(g.n());
    cake::FlowParams fp;
    cake::set_num_threads(1);
    const double hs1 = time_ms(
        [&] {
          cake::estimate_flow(scene.frame(0), scene.frame(1), g.n1, g.n2, fp,
                              v1.data(), v2.data());
        },
        1);
    cake::set_num_threads(threads);
    const double hsp = time_ms(
        [&] {
          cake::estimate_flow(scene.frame(0), scene.frame(1), g.n1, g.n2, fp,
                              v1.data(), v2.data());
        },
        1);
    row("optical flow (1 transition)", hs1, hsp);
  }

  // Gram concentration trials
  {
    const auto gb = cake::make_geometry(16, 16, 2, 2, 2, 2);
    cake::set_num_threads(1);
    const double g1 = time_ms(
        [&] {
          cake::concentration_report(gb, cake::MaskFamily::Rademacher, 50, 0.2,
                                     0.6, 2, 5);
        },
        1);
    cake::set_num_threads(threads);
    const double gp = time_ms(
        [&] {
          cake::concentration_report(gb, cake::MaskFamily::Rademacher, 50, 0.2,
                                     0.6, 2, 5);
        },
        1);
    row("gram concentration (50 trials)", g1, gp);
  }

  return 0;
}
