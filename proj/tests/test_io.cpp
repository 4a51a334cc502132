#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "cake/cube_io.hpp"
#include "cake/flow.hpp"
#include "cake/masks.hpp"
#include "cake/rng.hpp"

using namespace cake;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const char* name) {
  return (fs::temp_directory_path() / name).string();
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("cube write-read-write is byte stable") {
  const auto g = make_geometry(16, 8, 4, 2, 2, 2);
  VideoCube cube = make_scene_cube(g);
  Rng rng(11);
  for (auto& v : cube.data) v = rng.normal();
  const std::string p1 = tmp_path("cube_a.vcub"), p2 = tmp_path("cube_b.vcub");
  write_cube(cube, p1);
  VideoCube back = read_cube(p1);
  CHECK(back.rows == 16);
  CHECK(back.cols == 8);
  CHECK(back.frames == 4);
  CHECK(back.kind == CubeKind::Scene);
  write_cube(back, p2);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("cube payload size arithmetic") {
  const auto g = make_geometry(128, 256, 28, 2, 2, 4);
  VideoCube cube = make_scene_cube(g);
  const std::string p = tmp_path("cube_big.vcub");
  write_cube(cube, p);
  CHECK(fs::file_size(p) == 32 + std::uintmax_t(128) * 256 * 28 * 4);
  fs::remove(p);
}

TEST_CASE("cube header errors") {
  const std::string p = tmp_path("cube_bad.vcub");
  {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << "NOPE";
    std::string zeros(60, '\0');
    f.write(zeros.data(), zeros.size());
  }
  CHECK_THROWS_AS(read_cube(p), FormatError);

  const auto g = make_geometry(8, 8, 2, 1, 1, 1);
  VideoCube cube = make_scene_cube(g);
  write_cube(cube, p);
  // chop the payload
  auto bytes = slurp(p);
  bytes.resize(bytes.size() - 10);
  {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), std::streamsize(bytes.size()));
  }
  CHECK_THROWS_WITH_AS(read_cube(p), doctest::Contains("truncated"),
                       FormatError);
  CHECK_THROWS_AS(read_cube(tmp_path("does_not_exist.vcub")), FormatError);

  // dimension overflow in the header
  {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << "VCUB";
    const unsigned char ver[4] = {1, 0, 0, 0};  // version 1, dtype 0
    f.write(reinterpret_cast<const char*>(ver), 4);
    const unsigned char big[4] = {0xff, 0xff, 0xff, 0x7f};
    f.write(reinterpret_cast<const char*>(big), 4);  // rows
    f.write(reinterpret_cast<const char*>(big), 4);  // cols
    f.write(reinterpret_cast<const char*>(big), 4);  // frames
    std::string zeros(12, '\0');
    f.write(zeros.data(), std::streamsize(zeros.size()));
  }
  CHECK_THROWS_WITH_AS(read_cube(p), doctest::Contains("overflow"),
                       FormatError);
}

TEST_CASE("measurement flag and frame rate ratio survive the round trip") {
  const auto g = make_geometry(8, 8, 4, 2, 2, 4);
  VideoCube meas = make_measurement_cube(g);
  const std::string p = tmp_path("cube_meas.vcub");
  write_cube(meas, p);
  VideoCube back = read_cube(p);
  CHECK(back.kind == CubeKind::Measurement);
  CHECK(back.frame_rate_ratio == 4);
}

TEST_CASE("masks round trip bit-exactly, dsm components recomputed") {
  const auto g = make_geometry(8, 8, 4, 2, 2, 2);
  MaskSequence seq = gen_dsm(g, 0.383, 0.924, 77);
  const std::string p = tmp_path("masks.msks");
  write_masks(seq, p);
  MaskSequence back = read_masks(p);
  CHECK(back.family == MaskFamily::Dsm);
  CHECK(back.geometry == g);
  CHECK(back.seed == 77);
  CHECK(back.masks == seq.masks);
  REQUIRE(back.dsm.sigma.size() == seq.dsm.sigma.size());
  for (std::size_t k = 0; k < seq.dsm.sigma.size(); ++k)
    CHECK(back.dsm.sigma[k] == seq.dsm.sigma[k]);
  CHECK(back.dsm.lowres == seq.dsm.lowres);
  for (std::size_t i = 0; i < seq.dsm.highres.size(); ++i)
    CHECK(back.dsm.highres[i] ==
          doctest::Approx(seq.dsm.highres[i]).epsilon(1e-12));

  MaskSequence rad = gen_rademacher(g, 5);
  write_masks(rad, p);
  MaskSequence rad_back = read_masks(p);
  CHECK(rad_back.masks == rad.masks);
  CHECK(rad_back.family == MaskFamily::Rademacher);
}

TEST_CASE("mask file errors") {
  const std::string p = tmp_path("masks_bad.msks");
  {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    std::string junk(100, 'x');
    f.write(junk.data(), std::streamsize(junk.size()));
  }
  CHECK_THROWS_AS(read_masks(p), FormatError);
}

TEST_CASE("flow file round trip (float32 storage)") {
  FlowField flow;
  flow.rows = 4;
  flow.cols = 6;
  flow.transitions = 3;
  Rng rng(9);
  flow.v1.resize(4 * 6 * 3);
  flow.v2.resize(4 * 6 * 3);
  for (auto& v : flow.v1) v = rng.normal();
  for (auto& v : flow.v2) v = rng.normal();
  const std::string p = tmp_path("field.flow");
  write_flow(flow, p);
  FlowField back = read_flow(p);
  CHECK(back.rows == 4);
  CHECK(back.transitions == 3);
  for (std::size_t i = 0; i < flow.v1.size(); ++i) {
    CHECK(back.v1[i] == double(float(flow.v1[i])));
    CHECK(back.v2[i] == double(float(flow.v2[i])));
  }
}

TEST_CASE("pgm dump re-imports losslessly at 16-bit depth") {
  const int rows = 8, cols = 12;
  std::vector<double> img(rows * cols);
  Rng rng(13);
  for (auto& v : img) v = rng.uniform(-0.3, 1.7);
  const std::string p = tmp_path("frame.pgm");
  write_pgm(img.data(), rows, cols, p);

  std::vector<double> back;
  int r = 0, c = 0;
  read_pgm(p, back, r, c);
  REQUIRE(r == rows);
  REQUIRE(c == cols);
  double lo = img[0], hi = img[0];
  for (double v : img) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double q = (hi - lo) / 65535.0;
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(std::fabs(back[i] - img[i]) <= 0.5 * q + 1e-12);

  // idempotent after the first quantization
  const std::string p2 = tmp_path("frame2.pgm");
  write_pgm(back.data(), r, c, p2);
  std::vector<double> back2;
  read_pgm(p2, back2, r, c);
  CHECK(back2 == back);
}

TEST_CASE("pgm frame dumps share one intensity mapping") {
  const auto g = make_geometry(8, 8, 3, 2, 2, 3);
  VideoCube cube = make_scene_cube(g);
  Rng rng(21);
  for (auto& v : cube.data) v = rng.uniform01();
  const std::string prefix = tmp_path("cube_dump");
  dump_pgm_frames(cube, prefix);
  for (int t = 0; t < 3; ++t) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%04d.pgm", prefix.c_str(), t);
    std::vector<double> frame;
    int r = 0, c = 0;
    read_pgm(name, frame, r, c);
    double lo = cube.data[0], hi = cube.data[0];
    for (double v : cube.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double q = (hi - lo) / 65535.0;
    for (int i = 0; i < r * c; ++i)
      CHECK(std::fabs(frame[i] - cube.frame(t)[i]) <= 0.5 * q + 1e-12);
  }
}

}  // TEST_SUITE
