#include "cake/cube_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace cake {

namespace {

constexpr std::uint16_t kCubeVersion = 1;

void put_u16(std::string& b, std::uint16_t v) {
  b.push_back(char(v & 0xff));
  b.push_back(char((v >> 8) & 0xff));
}
void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(char((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) {
  return std::uint16_t(p[0]) | (std::uint16_t(p[1]) << 8);
}
std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}

float to_float_le(const unsigned char* p) {
  std::uint32_t bits = get_u32(p);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

void append_float_le(std::string& b, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(b, bits);
}

}  // namespace

void write_cube(const VideoCube& cube, const std::string& path) {
  std::string buf;
  buf.reserve(32 + cube.data.size() * 4);
  buf += "VCUB";
  put_u16(buf, kCubeVersion);
  put_u16(buf, 0);  // dtype float32
  put_u32(buf, std::uint32_t(cube.rows));
  put_u32(buf, std::uint32_t(cube.cols));
  put_u32(buf, std::uint32_t(cube.frames));
  std::uint32_t flags = (cube.kind == CubeKind::Measurement) ? 1u : 0u;
  flags |= std::uint32_t(std::min(cube.frame_rate_ratio, 255)) << 8;
  put_u32(buf, flags);
  buf.append(8, '\0');  // reserved
  for (double v : cube.data) append_float_le(buf, float(v));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f.write(buf.data(), std::streamsize(buf.size()));
  if (!f) throw FormatError("short write: " + path);
}

VideoCube read_cube(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open: " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 32) throw FormatError("truncated header: " + path);
  if (std::memcmp(raw.data(), "VCUB", 4) != 0)
    throw FormatError("magic mismatch (not a VCUB file): " + path);
  const std::uint16_t version = get_u16(raw.data() + 4);
  if (version != kCubeVersion)
    throw FormatError("unsupported VCUB version " + std::to_string(version));
  const std::uint16_t dtype = get_u16(raw.data() + 6);
  if (dtype != 0)
    throw FormatError("unsupported VCUB dtype " + std::to_string(dtype));
  const std::uint32_t rows = get_u32(raw.data() + 8);
  const std::uint32_t cols = get_u32(raw.data() + 12);
  const std::uint32_t frames = get_u32(raw.data() + 16);
  const std::uint32_t flags = get_u32(raw.data() + 20);

  if (rows == 0 || cols == 0 || frames == 0)
    throw FormatError("zero dimension in header: " + path);
  const std::uint64_t count = std::uint64_t(rows) * cols * frames;
  if (count > std::uint64_t(std::numeric_limits<std::int32_t>::max()))
    throw FormatError("dimension overflow in header: " + path);
  const std::uint64_t need = 32 + count * 4;
  if (raw.size() < need) throw FormatError("truncated payload: " + path);

  VideoCube cube((flags & 1u) ? CubeKind::Measurement : CubeKind::Scene,
                 int(rows), int(cols), int(frames),
                 std::max(1, int((flags >> 8) & 0xffu)));
  const unsigned char* p = raw.data() + 32;
  for (std::uint64_t i = 0; i < count; ++i)
    cube.data[i] = double(to_float_le(p + i * 4));
  return cube;
}

void write_pgm(const double* img, int rows, int cols, const std::string& path) {
  double lo = img[0], hi = img[0];
  const std::size_t count = std::size_t(rows) * cols;
  for (std::size_t i = 1; i < count; ++i) {
    lo = std::min(lo, img[i]);
    hi = std::max(hi, img[i]);
  }
  char header[160];
  // hexfloat range comment makes the mapping exactly invertible
  int len = std::snprintf(header, sizeof header, "P5\n# range %a %a\n%d %d\n65535\n",
                          lo, hi, cols, rows);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f.write(header, len);
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  std::string buf;
  buf.reserve(count * 2);
  for (std::size_t i = 0; i < count; ++i) {
    const long v = std::lround((img[i] - lo) * scale);
    const unsigned px = unsigned(std::clamp(v, 0L, 65535L));
    buf.push_back(char((px >> 8) & 0xff));  // big-endian per PGM convention
    buf.push_back(char(px & 0xff));
  }
  f.write(buf.data(), std::streamsize(buf.size()));
  if (!f) throw FormatError("short write: " + path);
}

void read_pgm(const std::string& path, std::vector<double>& img, int& rows,
              int& cols) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open: " + path);
  std::string magic;
  f >> magic;
  if (magic != "P5") throw FormatError("magic mismatch (not P5): " + path);

  double lo = 0.0, hi = 1.0;
  bool have_range = false;
  auto skip_ws_and_comments = [&]() {
    while (true) {
      int ch = f.peek();
      if (ch == '#') {
        std::string line;
        std::getline(f, line);
        double a, b;
        if (std::sscanf(line.c_str(), "# range %la %la", &a, &b) == 2) {
          lo = a;
          hi = b;
          have_range = true;
        }
      } else if (std::isspace(ch)) {
        f.get();
      } else {
        break;
      }
    }
  };
  skip_ws_and_comments();
  int w = 0, h = 0, maxval = 0;
  f >> w;
  skip_ws_and_comments();
  f >> h;
  skip_ws_and_comments();
  f >> maxval;
  if (!f || w <= 0 || h <= 0 || maxval != 65535)
    throw FormatError("unsupported PGM header: " + path);
  f.get();  // single whitespace before binary data
  rows = h;
  cols = w;
  const std::size_t count = std::size_t(rows) * cols;
  std::vector<unsigned char> raw(count * 2);
  f.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  if (!f) throw FormatError("truncated payload: " + path);
  if (!have_range) hi = 1.0, lo = 0.0;
  img.resize(count);
  const double scale = (hi - lo) / 65535.0;
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned px = (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
    img[i] = lo + px * scale;
  }
}

void dump_pgm_frames(const VideoCube& cube, const std::string& prefix) {
  // One shared mapping across the cube so frames are comparable
  double lo = cube.data[0], hi = cube.data[0];
  for (double v : cube.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  for (int t = 0; t < cube.frames; ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "_%04d.pgm", t);
    char header[160];
    int len = std::snprintf(header, sizeof header,
                            "P5\n# range %a %a\n%d %d\n65535\n", lo, hi,
                            cube.cols, cube.rows);
    std::ofstream f(prefix + name, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open for writing: " + prefix + name);
    f.write(header, len);
    const double* img = cube.frame(t);
    std::string buf;
    buf.reserve(std::size_t(cube.frame_size()) * 2);
    for (std::int64_t i = 0; i < cube.frame_size(); ++i) {
      const long v = std::lround((img[i] - lo) * scale);
      const unsigned px = unsigned(std::clamp(v, 0L, 65535L));
      buf.push_back(char((px >> 8) & 0xff));
      buf.push_back(char(px & 0xff));
    }
    f.write(buf.data(), std::streamsize(buf.size()));
  }
}

}  // namespace cake
