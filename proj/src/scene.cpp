#include "cake/scene.hpp"

#include <algorithm>
#include <cmath>

#include "cake/rng.hpp"

namespace cake {

namespace {

double wrap(double x, int n) {
  x = std::fmod(x, double(n));
  return x < 0.0 ? x + n : x;
}

// Overlap of the circular interval [a, a+len) with the unit cell [i, i+1)
// on a circle of circumference n. len is assumed <= n.
double interval_coverage(double a, double len, int i, int n) {
  a = wrap(a, n);
  double total = 0.0;
  const double lo1 = a, hi1 = std::min(a + len, double(n));
  total += std::max(0.0, std::min(hi1, double(i + 1)) - std::max(lo1, double(i)));
  if (a + len > n) {
    const double hi2 = a + len - n;
    total += std::max(0.0, std::min(hi2, double(i + 1)) - std::max(0.0, double(i)));
  }
  return total;
}

double circ_dist(double a, double b, int n) {
  double d = std::fabs(a - b);
  d = std::fmod(d, double(n));
  return std::min(d, n - d);
}

double bilinear_wrap(const std::vector<double>& img, int rows, int cols,
                     double r, double c) {
  r = wrap(r, rows);
  c = wrap(c, cols);
  const int r0 = int(r) % rows, c0 = int(c) % cols;
  const int r1 = (r0 + 1) % rows, c1 = (c0 + 1) % cols;
  const double fr = r - int(r), fc = c - int(c);
  return img[r0 * cols + c0] * (1 - fr) * (1 - fc) +
         img[r0 * cols + c1] * (1 - fr) * fc +
         img[r1 * cols + c0] * fr * (1 - fc) + img[r1 * cols + c1] * fr * fc;
}

struct Blob {
  double r, c, sigma, amp;
};

void render_rect(VideoCube& cube, int t, double r, double c, double h,
                 double w, double intensity) {
  const int n1 = cube.rows, n2 = cube.cols;
  r = wrap(r, n1);
  c = wrap(c, n2);
  const int ri0 = int(std::floor(r)), ci0 = int(std::floor(c));
  // each circular row/col is visited at most once
  const int rspan = std::min(int(std::ceil(h)) + 1, n1 - 1);
  const int cspan = std::min(int(std::ceil(w)) + 1, n2 - 1);
  for (int a = 0; a <= rspan; ++a) {
    const int i = (ri0 + a) % n1;
    const double cov_r = interval_coverage(r, h, i, n1);
    if (cov_r <= 0.0) continue;
    for (int b = 0; b <= cspan; ++b) {
      const int j = (ci0 + b) % n2;
      const double cov_c = interval_coverage(c, w, j, n2);
      if (cov_c <= 0.0) continue;
      cube.at(t, i, j) += intensity * cov_r * cov_c;
    }
  }
}

void render_disc(VideoCube& cube, int t, double rc, double cc, double radius,
                 double intensity) {
  const int n1 = cube.rows, n2 = cube.cols;
  const int reach_r = std::min(int(std::ceil(radius)) + 1, (n1 - 1) / 2);
  const int reach_c = std::min(int(std::ceil(radius)) + 1, (n2 - 1) / 2);
  const int ri = int(std::floor(wrap(rc, n1)));
  const int ci = int(std::floor(wrap(cc, n2)));
  constexpr int kSub = 8;  // 8x8 sub-cell quadrature on boundary pixels
  for (int a = -reach_r; a <= reach_r; ++a) {
    const int i = ((ri + a) % n1 + n1) % n1;
    for (int b = -reach_c; b <= reach_c; ++b) {
      const int j = ((ci + b) % n2 + n2) % n2;
      const double dr = circ_dist(i + 0.5, rc, n1);
      const double dc = circ_dist(j + 0.5, cc, n2);
      const double dist = std::hypot(dr, dc);
      double cov;
      if (dist <= radius - 0.8)
        cov = 1.0;
      else if (dist >= radius + 0.8)
        cov = 0.0;
      else {
        int inside = 0;
        for (int p = 0; p < kSub; ++p) {
          for (int q = 0; q < kSub; ++q) {
            const double sr = i + (p + 0.5) / kSub;
            const double sc = j + (q + 0.5) / kSub;
            const double ddr = circ_dist(sr, rc, n1);
            const double ddc = circ_dist(sc, cc, n2);
            if (ddr * ddr + ddc * ddc <= radius * radius) ++inside;
          }
        }
        cov = double(inside) / (kSub * kSub);
      }
      if (cov > 0.0) cube.at(t, i, j) += intensity * cov;
    }
  }
}

}  // namespace

VideoCube synth_scene(const SceneSpec& spec, const SamplingGeometry& g) {
  VideoCube cube = make_scene_cube(g);

  std::vector<Blob> blobs;
  if (spec.background == SceneSpec::Background::Blobs && spec.blob_count > 0) {
    Rng rng(spec.seed);
    blobs.reserve(spec.blob_count);
    for (int b = 0; b < spec.blob_count; ++b) {
      Blob bl;
      bl.r = rng.uniform(0.0, g.n1);
      bl.c = rng.uniform(0.0, g.n2);
      bl.sigma = rng.uniform(0.04, 0.12) * std::min(g.n1, g.n2);
      bl.amp = spec.blob_amp * rng.uniform(0.4, 1.0);
      blobs.push_back(bl);
    }
  }

  if (spec.background == SceneSpec::Background::Image &&
      (spec.bg_rows != g.n1 || spec.bg_cols != g.n2 ||
       spec.bg_image.size() != std::size_t(g.n())))
    throw DimensionError("synth_scene: background image size differs from "
                         "the frame size");

  for (int t = 0; t < g.N; ++t) {
    if (spec.background == SceneSpec::Background::Constant) {
      std::fill_n(cube.frame(t), cube.frame_size(), spec.bg_value);
    } else if (spec.background == SceneSpec::Background::Image) {
      const double br = t * spec.bg_vr, bc = t * spec.bg_vc;
      for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
          cube.at(t, i, j) =
              bilinear_wrap(spec.bg_image, g.n1, g.n2, i - br, j - bc);
    } else if (spec.background == SceneSpec::Background::Blobs) {
      const double br = t * spec.bg_vr, bc = t * spec.bg_vc;
      for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
          double v = 0.0;
          for (const Blob& bl : blobs) {
            const double dr = circ_dist(i + 0.5, bl.r + br, g.n1);
            const double dc = circ_dist(j + 0.5, bl.c + bc, g.n2);
            v += bl.amp * std::exp(-(dr * dr + dc * dc) /
                                   (2.0 * bl.sigma * bl.sigma));
          }
          cube.at(t, i, j) = v;
        }
      }
    }

    for (const SceneObject& obj : spec.objects) {
      const double r = obj.r0 + t * obj.vr;
      const double c = obj.c0 + t * obj.vc;
      if (obj.kind == SceneObject::Kind::Rect)
        render_rect(cube, t, r, c, obj.height, obj.width, obj.intensity);
      else
        render_disc(cube, t, r, c, obj.radius, obj.intensity);
    }
  }

  for (double& v : cube.data) v = std::clamp(v, 0.0, 1.0);
  return cube;
}

}  // namespace cake
