#include <doctest.h>

#include <cmath>
#include <vector>

#include "cake/operators.hpp"
#include "cake/reference.hpp"
#include "cake/rng.hpp"
#include "oracles.hpp"

using namespace cake;

namespace {

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-30});
}

MaskSequence delta_masks(const SamplingGeometry& g) {
  MaskSequence seq;
  seq.geometry = g;
  seq.family = MaskFamily::Rademacher;
  seq.masks.assign(std::size_t(g.N) * g.n(), 0.0);
  for (int t = 0; t < g.N; ++t) seq.masks[std::size_t(t) * g.n()] = 1.0;
  return seq;
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("bccb convolution basics") {
  const int rows = 8, cols = 8;
  Rng rng(1);
  std::vector<double> img(rows * cols), out(rows * cols);
  for (auto& v : img) v = rng.normal();

  // delta kernel: identity
  std::vector<double> delta(rows * cols, 0.0);
  delta[0] = 1.0;
  bccb_convolve(img.data(), delta.data(), out.data(), rows, cols);
  for (int i = 0; i < rows * cols; ++i)
    CHECK(std::fabs(out[i] - img[i]) < 1e-12);

  // constant image: every output equals v * sum(kernel)
  std::vector<double> kernel(rows * cols);
  for (auto& v : kernel) v = rng.normal();
  double ksum = 0.0;
  for (double v : kernel) ksum += v;
  std::vector<double> constant(rows * cols, 0.7);
  bccb_convolve(constant.data(), kernel.data(), out.data(), rows, cols);
  for (int i = 0; i < rows * cols; ++i)
    CHECK(out[i] == doctest::Approx(0.7 * ksum).epsilon(1e-10));
}

TEST_CASE("fft path equals the direct quadruple loop, sizes up to 16") {
  Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 2 + int(rng.below(15));
    const int cols = 2 + int(rng.below(15));
    std::vector<double> img(rows * cols), ker(rows * cols), a(rows * cols),
        b(rows * cols);
    for (auto& v : img) v = rng.normal();
    for (auto& v : ker) v = rng.normal();
    bccb_convolve(img.data(), ker.data(), a.data(), rows, cols);
    ref::direct_convolve_2d(img.data(), ker.data(), b.data(), rows, cols);
    double scale = 0.0;
    for (double v : b) scale = std::max(scale, std::fabs(v));
    for (int i = 0; i < rows * cols; ++i)
      CHECK(std::fabs(a[i] - b[i]) <= 1e-10 * std::max(1.0, scale));
  }
}

TEST_CASE("subsample semantics") {
  // d = 1: identity
  std::vector<double> img{1, 2, 3, 4};
  std::vector<double> out(4);
  subsample(img.data(), 2, 2, 1, 1, 0, 0, out.data());
  CHECK(out == img);

  // 4x4 ramp, d1=d2=2, phase (0,0): picks (0,0),(0,2),(2,0),(2,2)
  std::vector<double> ramp(16);
  for (int i = 0; i < 16; ++i) ramp[i] = i;
  std::vector<double> picked(4);
  subsample(ramp.data(), 4, 4, 2, 2, 0, 0, picked.data());
  CHECK(picked == std::vector<double>{0, 2, 8, 10});

  CHECK_THROWS_AS(subsample(ramp.data(), 4, 4, 2, 2, 2, 0, picked.data()),
                  DimensionError);

  // adjoint then forward is the identity on the kept lattice, zero elsewhere
  std::vector<double> vals{1, 3, 9, 11};
  std::vector<double> up(16);
  subsample_adjoint(vals.data(), 4, 4, 2, 2, 1, 1, up.data());
  std::vector<double> again(4);
  subsample(up.data(), 4, 4, 2, 2, 1, 1, again.data());
  CHECK(again == vals);
  int nonzero = 0;
  for (double v : up)
    if (v != 0.0) ++nonzero;
  CHECK(nonzero == 4);
}

TEST_CASE("integration downsampling and adjoint") {
  std::vector<double> constant(16, 0.3), out(4);
  integrate_downsample(constant.data(), 4, 4, 2, 2, out.data());
  for (double v : out) CHECK(v == doctest::Approx(1.2).epsilon(1e-15));

  // D^T D on a blockwise-constant image = d * image
  std::vector<double> blocky(16);
  const double vals[4] = {0.1, 0.5, -0.2, 0.9};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) blocky[i * 4 + j] = vals[(i / 2) * 2 + j / 2];
  std::vector<double> down(4), up(16);
  integrate_downsample(blocky.data(), 4, 4, 2, 2, down.data());
  integrate_adjoint(down.data(), 4, 4, 2, 2, up.data());
  for (int i = 0; i < 16; ++i)
    CHECK(up[i] == doctest::Approx(4.0 * blocky[i]).epsilon(1e-15));

  // random image matches the serial reference
  Rng rng(3);
  std::vector<double> img(16), expect(4);
  for (auto& v : img) v = rng.normal();
  integrate_downsample(img.data(), 4, 4, 2, 2, out.data());
  ref::direct_integrate(img.data(), 4, 4, 2, 2, expect.data());
  CHECK(out == expect);
}

TEST_CASE("random demodulation downsampling") {
  Rng rng(4);
  std::vector<double> img(16), signs(16, 1.0), out(4), expect(4);
  for (auto& v : img) v = rng.normal();
  random_demod_downsample(img.data(), signs.data(), 4, 4, 2, 2, out.data());
  integrate_downsample(img.data(), 4, 4, 2, 2, expect.data());
  CHECK(out == expect);

  for (auto& v : signs) v = -1.0;
  random_demod_downsample(img.data(), signs.data(), 4, 4, 2, 2, out.data());
  for (int i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(-expect[i]));

  for (auto& v : signs) v = rng.sign();
  random_demod_downsample(img.data(), signs.data(), 4, 4, 2, 2, out.data());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          s += signs[(2 * i + a) * 4 + 2 * j + b] * img[(2 * i + a) * 4 + 2 * j + b];
      CHECK(out[i * 2 + j] == doctest::Approx(s).epsilon(1e-15));
    }
  }
}

TEST_CASE("identity configuration reproduces the scene") {
  const auto g = make_geometry(8, 8, 4, 1, 1, 1);  // B=1, d=1
  MaskSequence masks = delta_masks(g);
  CakeOperator op(masks, Downsampler::Subsample);
  Rng rng(5);
  VideoCube scene = make_scene_cube(g);
  for (auto& v : scene.data) v = rng.normal();
  VideoCube y = op.forward(scene);
  for (std::size_t i = 0; i < scene.data.size(); ++i)
    CHECK(std::fabs(y.data[i] - scene.data[i]) < 1e-12);
  VideoCube back = op.adjoint(y);
  for (std::size_t i = 0; i < scene.data.size(); ++i)
    CHECK(std::fabs(back.data[i] - scene.data[i]) < 1e-11);
}

TEST_CASE("full-exposure keyed acquisition sums consecutive frames") {
  const auto g = make_geometry(8, 8, 4, 1, 1, 4);  // h = delta, d = 1, B = 4
  MaskSequence masks = delta_masks(g);
  CakeOperator op(masks, Downsampler::Subsample);
  Rng rng(6);
  VideoCube scene = make_scene_cube(g);
  for (auto& v : scene.data) v = rng.normal();
  VideoCube y = op.forward(scene);
  REQUIRE(y.frames == 1);
  for (std::int64_t i = 0; i < g.n(); ++i) {
    double s = 0.0;
    for (int t = 0; t < 4; ++t) s += scene.frame(t)[i];
    CHECK(y.data[i] == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("dense-matrix oracle equality at toy scale") {
  const auto g = make_geometry(8, 8, 4, 2, 2, 2);  // n=64, N=4
  Rng rng(7);
  for (auto kind : {Downsampler::Subsample, Downsampler::Integrate,
                    Downsampler::RandomDemod}) {
    for (int fam = 0; fam < 2; ++fam) {
      MaskSequence masks = fam == 0 ? gen_rademacher(g, 11)
                                    : gen_dsm(g, 0.383, 0.924, 11);
      CakeOperator op(masks, kind, /*sign_seed=*/99);
      std::vector<double> signs = op.signs();
      if (signs.empty()) signs.assign(g.n(), 1.0);
      auto A = oracle::dense_cake_matrix(masks, kind, signs, g.d1 - 1,
                                         g.d2 - 1);

      VideoCube scene = make_scene_cube(g);
      for (auto& v : scene.data) v = rng.normal();
      VideoCube y = op.forward(scene);
      std::vector<double> y_dense(g.measurement_size());
      oracle::dense_apply(A, g.measurement_size(), g.scene_size(),
                          scene.data.data(), y_dense.data());
      for (std::int64_t i = 0; i < g.measurement_size(); ++i)
        CHECK(std::fabs(y.data[i] - y_dense[i]) <= 1e-10);

      VideoCube meas = make_measurement_cube(g);
      for (auto& v : meas.data) v = rng.normal();
      VideoCube bt = op.adjoint(meas);
      std::vector<double> bt_dense(g.scene_size());
      oracle::dense_apply_t(A, g.measurement_size(), g.scene_size(),
                            meas.data.data(), bt_dense.data());
      for (std::int64_t i = 0; i < g.scene_size(); ++i)
        CHECK(std::fabs(bt.data[i] - bt_dense[i]) <= 1e-10);
    }
  }
}

TEST_CASE("adjoint identity over random trials") {
  const auto g = make_geometry(16, 16, 8, 2, 2, 4);
  MaskSequence masks = gen_rademacher(g, 17);
  for (auto kind : {Downsampler::Subsample, Downsampler::Integrate,
                    Downsampler::RandomDemod, Downsampler::RandomDemodBinary}) {
    CakeOperator op(masks, kind, 5);
    Rng rng(18);
    VideoCube f = make_scene_cube(g), y = make_measurement_cube(g);
    for (int trial = 0; trial < 25; ++trial) {
      for (auto& v : f.data) v = rng.normal();
      for (auto& v : y.data) v = rng.normal();
      VideoCube Af = op.forward(f);
      VideoCube Aty = op.adjoint(y);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t i = 0; i < y.data.size(); ++i)
        lhs += Af.data[i] * y.data[i];
      for (std::size_t i = 0; i < f.data.size(); ++i)
        rhs += f.data[i] * Aty.data[i];
      CHECK(rel_err(lhs, rhs) < 1e-10);
    }
  }
}

TEST_CASE("noiseless forward is linear") {
  const auto g = make_geometry(8, 8, 4, 2, 2, 2);
  MaskSequence masks = gen_dsm(g, 0.383, 0.924, 23);
  CakeOperator op(masks, Downsampler::Subsample);
  Rng rng(24);
  VideoCube f = make_scene_cube(g), h = make_scene_cube(g);
  for (auto& v : f.data) v = rng.normal();
  for (auto& v : h.data) v = rng.normal();
  const double a = 1.7, b = -0.4;
  VideoCube combo = make_scene_cube(g);
  for (std::size_t i = 0; i < f.data.size(); ++i)
    combo.data[i] = a * f.data[i] + b * h.data[i];
  VideoCube ya = op.forward(f), yb = op.forward(h), yc = op.forward(combo);
  for (std::size_t i = 0; i < yc.data.size(); ++i)
    CHECK(std::fabs(yc.data[i] - a * ya.data[i] - b * yb.data[i]) < 1e-12);
}

TEST_CASE("PSF identity through the full operator") {
  const auto g = make_geometry(8, 8, 1, 1, 1, 1);
  MaskSequence masks = gen_rademacher(g, 29);
  CakeOperator op(masks, Downsampler::Subsample);
  VideoCube delta = make_scene_cube(g);
  delta.data[0] = 1.0;
  VideoCube y = op.forward(delta);
  for (std::int64_t i = 0; i < g.n(); ++i)
    CHECK(std::fabs(y.data[i] - masks.mask(0)[i]) < 1e-12);
}

TEST_CASE("power iteration norm estimate is reproducible and finite") {
  const auto g = make_geometry(8, 8, 4, 2, 2, 2);
  MaskSequence masks = gen_rademacher(g, 31);
  CakeOperator op(masks, Downsampler::Subsample);
  const double a = op.norm_sq_estimate(50, 7);
  const double b = op.norm_sq_estimate(50, 7);
  CHECK(a == b);
  CHECK(std::isfinite(a));
  CHECK(a > 0.0);
}

TEST_CASE("difference-frame transforms") {
  const auto g = make_geometry(4, 4, 5, 2, 2, 5);
  Rng rng(33);

  // constant-in-time scene: theta = (f1, 0, ..., 0)
  VideoCube f = make_scene_cube(g);
  for (std::int64_t i = 0; i < g.n(); ++i) {
    const double v = rng.normal();
    for (int t = 0; t < g.N; ++t) f.frame(t)[i] = v;
  }
  VideoCube theta = frames_to_diff(f);
  for (std::int64_t i = 0; i < g.n(); ++i)
    CHECK(theta.frame(0)[i] == f.frame(0)[i]);
  for (int t = 1; t < g.N; ++t)
    for (std::int64_t i = 0; i < g.n(); ++i)
      CHECK(theta.frame(t)[i] == 0.0);

  // theta = (x, 0, ..., 0) integrates to constant frames
  VideoCube back = diff_to_frames(theta);
  for (int t = 0; t < g.N; ++t)
    for (std::int64_t i = 0; i < g.n(); ++i)
      CHECK(back.frame(t)[i] == f.frame(t)[i]);

  // random round trip is exact
  VideoCube r = make_scene_cube(g);
  for (auto& v : r.data) v = rng.normal();
  VideoCube rt = diff_to_frames(frames_to_diff(r));
  for (std::size_t i = 0; i < r.data.size(); ++i)
    CHECK(std::fabs(rt.data[i] - r.data[i]) < 1e-12);

  // suffix sum is the adjoint of the running sum
  std::vector<double> x(g.scene_size()), yv(g.scene_size()),
      Lx(g.scene_size()), Lty(g.scene_size());
  for (auto& v : x) v = rng.normal();
  for (auto& v : yv) v = rng.normal();
  diff_to_frames(x.data(), Lx.data(), g.N, g.n());
  suffix_sum_frames(yv.data(), Lty.data(), g.N, g.n());
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lhs += Lx[i] * yv[i];
    rhs += x[i] * Lty[i];
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("tv stencils") {
  const int rows = 6, cols = 6;
  std::vector<double> constant(rows * cols, 2.5), gr(rows * cols),
      gc(rows * cols);
  tv_gradient(constant.data(), rows, cols, gr.data(), gc.data());
  for (int i = 0; i < rows * cols; ++i) {
    CHECK(gr[i] == 0.0);
    CHECK(gc[i] == 0.0);
  }
  CHECK(tv_isotropic(constant.data(), rows, cols) == 0.0);

  // hand-computed 2x2 case
  std::vector<double> tiny{1.0, 2.0, 3.0, 5.0};
  std::vector<double> tr(4), tc(4);
  tv_gradient(tiny.data(), 2, 2, tr.data(), tc.data());
  CHECK(tr == std::vector<double>{2.0, 3.0, -2.0, -3.0});
  CHECK(tc == std::vector<double>{1.0, -1.0, 2.0, -2.0});

  // adjoint identity
  Rng rng(41);
  std::vector<double> img(rows * cols), wr(rows * cols), wc(rows * cols),
      adj(rows * cols);
  for (auto& v : img) v = rng.normal();
  for (auto& v : wr) v = rng.normal();
  for (auto& v : wc) v = rng.normal();
  tv_gradient(img.data(), rows, cols, gr.data(), gc.data());
  tv_gradient_adjoint(wr.data(), wc.data(), rows, cols, adj.data());
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < rows * cols; ++i) {
    lhs += gr[i] * wr[i] + gc[i] * wc[i];
    rhs += img[i] * adj[i];
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

}  // TEST_SUITE
