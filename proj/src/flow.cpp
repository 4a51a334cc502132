#include "cake/flow.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "cake/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cake {

namespace {

double bilinear_circular(const double* img, int rows, int cols, double r,
                         double c) {
  r = std::fmod(r, double(rows));
  if (r < 0) r += rows;
  c = std::fmod(c, double(cols));
  if (c < 0) c += cols;
  const int r0 = int(r), c0 = int(c);
  const int r1 = (r0 + 1) % rows, c1 = (c0 + 1) % cols;
  const double fr = r - r0, fc = c - c0;
  return img[r0 * cols + c0] * (1 - fr) * (1 - fc) +
         img[r0 * cols + c1] * (1 - fr) * fc +
         img[r1 * cols + c0] * fr * (1 - fc) + img[r1 * cols + c1] * fr * fc;
}

void downsample2(const std::vector<double>& src, int rows, int cols,
                 std::vector<double>& dst) {
  const int r2 = rows / 2, c2 = cols / 2;
  dst.assign(std::size_t(r2) * c2, 0.0);
  for (int i = 0; i < r2; ++i)
    for (int j = 0; j < c2; ++j)
      dst[i * c2 + j] = 0.25 * (src[(2 * i) * cols + 2 * j] +
                                src[(2 * i) * cols + 2 * j + 1] +
                                src[(2 * i + 1) * cols + 2 * j] +
                                src[(2 * i + 1) * cols + 2 * j + 1]);
}

// flow upsample: bilinear resize to (rows, cols) with values scaled by the
// resolution ratio
void upsample_flow(const std::vector<double>& src, int sr, int sc,
                   std::vector<double>& dst, int rows, int cols) {
  dst.assign(std::size_t(rows) * cols, 0.0);
  const double rs = double(sr) / rows, cs = double(sc) / cols;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      dst[i * cols + j] =
          bilinear_circular(src.data(), sr, sc, (i + 0.5) * rs - 0.5,
                            (j + 0.5) * cs - 0.5) /
          rs;
}

// One Horn-Schunck stage at a fixed scale. (u0,v0) is the flow the `next`
// frame was warped with; the smoothness term acts on the total flow.
void hs_level(const std::vector<double>& prev, const std::vector<double>& next,
              int rows, int cols, const FlowParams& params,
              std::vector<double>& u, std::vector<double>& v) {
  const std::size_t count = std::size_t(rows) * cols;
  const std::vector<double> u0 = u, v0 = v;

  std::vector<double> nextw(count), ix(count), iy(count), it(count);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const std::size_t p = std::size_t(i) * cols + j;
      nextw[p] =
          bilinear_circular(next.data(), rows, cols, i + v0[p], j + u0[p]);
    }
  // central differences of the average image, circular
  for (int i = 0; i < rows; ++i) {
    const int iu = (i - 1 + rows) % rows, id = (i + 1) % rows;
    for (int j = 0; j < cols; ++j) {
      const int jl = (j - 1 + cols) % cols, jr = (j + 1) % cols;
      const std::size_t p = std::size_t(i) * cols + j;
      const auto avg = [&](int a, int b) {
        const std::size_t q = std::size_t(a) * cols + b;
        return 0.5 * (prev[q] + nextw[q]);
      };
      ix[p] = 0.5 * (avg(i, jr) - avg(i, jl));
      iy[p] = 0.5 * (avg(id, j) - avg(iu, j));
      it[p] = nextw[p] - prev[p];
    }
  }

  std::vector<double> un(count), vn(count);
  for (int sweep = 0; sweep < params.iterations; ++sweep) {
    // Jacobi update: the new field depends only on the old one, so the
    // parallel result is identical to the serial one.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < rows; ++i) {
      const int iu = (i - 1 + rows) % rows, id = (i + 1) % rows;
      for (int j = 0; j < cols; ++j) {
        const int jl = (j - 1 + cols) % cols, jr = (j + 1) % cols;
        const std::size_t p = std::size_t(i) * cols + j;
        const double ubar = 0.25 * (u[iu * cols + j] + u[id * cols + j] +
                                    u[i * cols + jl] + u[i * cols + jr]);
        const double vbar = 0.25 * (v[iu * cols + j] + v[id * cols + j] +
                                    v[i * cols + jl] + v[i * cols + jr]);
        const double resid =
            ix[p] * (ubar - u0[p]) + iy[p] * (vbar - v0[p]) + it[p];
        const double denom = params.lambda + ix[p] * ix[p] + iy[p] * iy[p];
        un[p] = ubar - ix[p] * resid / denom;
        vn[p] = vbar - iy[p] * resid / denom;
      }
    }
    u.swap(un);
    v.swap(vn);
  }
}

}  // namespace

void estimate_flow(const double* prev, const double* next, int rows, int cols,
                   const FlowParams& params, double* v1, double* v2) {
  // pyramid (level 0 finest); stop early if a dimension stops being even
  std::vector<std::vector<double>> pp, pn;
  std::vector<int> pr, pc;
  pp.emplace_back(prev, prev + std::size_t(rows) * cols);
  pn.emplace_back(next, next + std::size_t(rows) * cols);
  pr.push_back(rows);
  pc.push_back(cols);
  for (int l = 1; l < params.levels; ++l) {
    const int r = pr.back(), c = pc.back();
    if (r % 2 != 0 || c % 2 != 0 || r < 8 || c < 8) break;
    std::vector<double> dp, dn;
    downsample2(pp.back(), r, c, dp);
    downsample2(pn.back(), r, c, dn);
    pp.push_back(std::move(dp));
    pn.push_back(std::move(dn));
    pr.push_back(r / 2);
    pc.push_back(c / 2);
  }

  const int coarse = int(pr.size()) - 1;
  std::vector<double> u(static_cast<std::size_t>(pr[coarse]) * pc[coarse], 0.0);
  std::vector<double> v(u.size(), 0.0);
  for (int l = coarse; l >= 0; --l) {
    if (l != coarse) {
      std::vector<double> uu, vv;
      upsample_flow(u, pr[l + 1], pc[l + 1], uu, pr[l], pc[l]);
      upsample_flow(v, pr[l + 1], pc[l + 1], vv, pr[l], pc[l]);
      u.swap(uu);
      v.swap(vv);
    }
    hs_level(pp[l], pn[l], pr[l], pc[l], params, u, v);
  }
  std::memcpy(v1, u.data(), sizeof(double) * u.size());
  std::memcpy(v2, v.data(), sizeof(double) * v.size());
}

FlowField estimate_flow_sequence(const VideoCube& cube,
                                 const FlowParams& params) {
  FlowField flow;
  flow.rows = cube.rows;
  flow.cols = cube.cols;
  flow.transitions = cube.frames - 1;
  const std::size_t plane = std::size_t(cube.rows) * cube.cols;
  flow.v1.assign(plane * flow.transitions, 0.0);
  flow.v2.assign(plane * flow.transitions, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int t = 0; t < flow.transitions; ++t)
    estimate_flow(cube.frame(t), cube.frame(t + 1), cube.rows, cube.cols,
                  params, flow.v1_plane(t), flow.v2_plane(t));
  return flow;
}

// --- spline upsampling -------------------------------------------------------

namespace {

// Natural cubic spline on strided data; evaluates at `nq` query positions.
// Queries outside [xs[0], xs[m-1]] use the end segments (linear data stays
// exactly linear under extrapolation).
void spline_line(const double* y, int m, std::int64_t stride, double spacing,
                 double offset, const double* queries, int nq, double* out,
                 std::int64_t out_stride, std::vector<double>& scratch) {
  if (m == 1) {
    for (int q = 0; q < nq; ++q) out[q * out_stride] = y[0];
    return;
  }
  // second derivatives via the tridiagonal natural-spline system
  scratch.assign(std::size_t(m) * 2, 0.0);
  double* m2 = scratch.data();       // second derivatives
  double* cp = scratch.data() + m;   // forward-elimination scratch
  const double h = spacing;
  // rows 1..m-2: h/6*M[i-1] + 2h/3*M[i] + h/6*M[i+1] = (y[i+1]-2y[i]+y[i-1])/h
  if (m > 2) {
    const double diag = 2.0 * h / 3.0, off = h / 6.0;
    double beta = diag;
    m2[1] = (y[2 * stride] - 2.0 * y[stride] + y[0]) / h / beta;
    cp[1] = off / beta;
    for (int i = 2; i < m - 1; ++i) {
      beta = diag - off * cp[i - 1];
      cp[i] = off / beta;
      const double rhs = (y[(i + 1) * stride] - 2.0 * y[i * stride] +
                          y[(i - 1) * stride]) / h;
      m2[i] = (rhs - off * m2[i - 1]) / beta;
    }
    for (int i = m - 3; i >= 1; --i) m2[i] -= cp[i] * m2[i + 1];
  }
  m2[0] = 0.0;
  m2[m - 1] = 0.0;

  for (int q = 0; q < nq; ++q) {
    const double x = queries[q] - offset;
    int seg = int(std::floor(x / h));
    if (seg < 0) seg = 0;
    if (seg > m - 2) seg = m - 2;
    const double t = x - seg * h;
    const double ya = y[seg * stride], yb = y[(seg + 1) * stride];
    const double ma = m2[seg], mb = m2[seg + 1];
    const double a = (yb - ya) / h - h * (2.0 * ma + mb) / 6.0;
    out[q * out_stride] =
        ya + a * t + 0.5 * ma * t * t + (mb - ma) / (6.0 * h) * t * t * t;
  }
}

}  // namespace

VideoCube upsample_coarse(const VideoCube& coarse, const SamplingGeometry& g) {
  require_measurement_shape(coarse, g);

  // pass 1: rows m1 -> n1
  std::vector<double> q1(g.n1);
  for (int i = 0; i < g.n1; ++i) q1[i] = i;
  const double off1 = (g.d1 - 1) / 2.0;  // block-center sample positions
  std::vector<double> buf1(std::size_t(g.M) * g.n1 * g.m2);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int k = 0; k < g.M; ++k) {
    std::vector<double> scratch;
    for (int j = 0; j < g.m2; ++j)
      spline_line(coarse.frame(k) + j, g.m1, g.m2, g.d1, off1, q1.data(), g.n1,
                  buf1.data() + (std::size_t(k) * g.n1) * g.m2 + j, g.m2,
                  scratch);
  }

  // pass 2: cols m2 -> n2
  std::vector<double> q2(g.n2);
  for (int j = 0; j < g.n2; ++j) q2[j] = j;
  const double off2 = (g.d2 - 1) / 2.0;
  std::vector<double> buf2(std::size_t(g.M) * g.n1 * g.n2);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int k = 0; k < g.M; ++k) {
    std::vector<double> scratch;
    for (int i = 0; i < g.n1; ++i)
      spline_line(buf1.data() + (std::size_t(k) * g.n1 + i) * g.m2, g.m2, 1,
                  g.d2, off2, q2.data(), g.n2,
                  buf2.data() + (std::size_t(k) * g.n1 + i) * g.n2, 1, scratch);
  }

  // pass 3: time M -> N
  VideoCube out = make_scene_cube(g);
  std::vector<double> qt(g.N);
  for (int t = 0; t < g.N; ++t) qt[t] = t;
  const double offt = (g.B - 1) / 2.0;
  const std::int64_t plane = std::int64_t(g.n1) * g.n2;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t p = 0; p < plane; ++p) {
    std::vector<double> scratch;
    spline_line(buf2.data() + p, g.M, plane, g.B, offt, qt.data(), g.N,
                out.data.data() + p, plane, scratch);
  }
  return out;
}

// --- motion operator ---------------------------------------------------------

MotionOperator::MotionOperator(const FlowField& flow)
    : rows_(flow.rows), cols_(flow.cols), transitions_(flow.transitions) {
  const std::size_t plane = std::size_t(rows_) * cols_;
  idx_.resize(plane * transitions_ * 4);
  wgt_.resize(plane * transitions_ * 4);
  for (int t = 0; t < transitions_; ++t) {
    const double* v1 = flow.v1_plane(t);
    const double* v2 = flow.v2_plane(t);
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) {
        const std::size_t p = std::size_t(i) * cols_ + j;
        if (!std::isfinite(v1[p]) || !std::isfinite(v2[p]))
          throw InvalidFlowError("motion operator: non-finite flow value");
        double r = std::fmod(i - v2[p], double(rows_));
        if (r < 0) r += rows_;
        double c = std::fmod(j - v1[p], double(cols_));
        if (c < 0) c += cols_;
        const int r0 = int(r) % rows_, c0 = int(c) % cols_;
        const int r1 = (r0 + 1) % rows_, c1 = (c0 + 1) % cols_;
        const double fr = r - int(r), fc = c - int(c);
        const std::size_t base = (std::size_t(t) * plane + p) * 4;
        idx_[base + 0] = r0 * cols_ + c0;
        idx_[base + 1] = r0 * cols_ + c1;
        idx_[base + 2] = r1 * cols_ + c0;
        idx_[base + 3] = r1 * cols_ + c1;
        wgt_[base + 0] = (1 - fr) * (1 - fc);
        wgt_[base + 1] = (1 - fr) * fc;
        wgt_[base + 2] = fr * (1 - fc);
        wgt_[base + 3] = fr * fc;
      }
    }
  }
}

void MotionOperator::warp(int t, const double* frame, double* out) const {
  const std::size_t plane = std::size_t(rows_) * cols_;
  const std::size_t base = std::size_t(t) * plane * 4;
  for (std::size_t p = 0; p < plane; ++p) {
    const std::size_t b = base + p * 4;
    out[p] = wgt_[b] * frame[idx_[b]] + wgt_[b + 1] * frame[idx_[b + 1]] +
             wgt_[b + 2] * frame[idx_[b + 2]] + wgt_[b + 3] * frame[idx_[b + 3]];
  }
}

void MotionOperator::apply(const double* f, double* out) const {
  const std::size_t plane = std::size_t(rows_) * cols_;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int t = 0; t < transitions_; ++t) {
    warp(t, f + std::size_t(t) * plane, out + std::size_t(t) * plane);
    const double* next = f + std::size_t(t + 1) * plane;
    double* o = out + std::size_t(t) * plane;
    for (std::size_t p = 0; p < plane; ++p) o[p] -= next[p];
  }
}

void MotionOperator::apply_adjoint(const double* r, double* out) const {
  const std::size_t plane = std::size_t(rows_) * cols_;
  std::memset(out, 0, sizeof(double) * plane * (transitions_ + 1));
  // scatter warp transposes serially per transition (overlapping outputs)
  for (int t = 0; t < transitions_; ++t) {
    const double* rt = r + std::size_t(t) * plane;
    double* ft = out + std::size_t(t) * plane;
    const std::size_t base = std::size_t(t) * plane * 4;
    for (std::size_t p = 0; p < plane; ++p) {
      const std::size_t b = base + p * 4;
      ft[idx_[b]] += wgt_[b] * rt[p];
      ft[idx_[b + 1]] += wgt_[b + 1] * rt[p];
      ft[idx_[b + 2]] += wgt_[b + 2] * rt[p];
      ft[idx_[b + 3]] += wgt_[b + 3] * rt[p];
    }
    double* fnext = out + std::size_t(t + 1) * plane;
    for (std::size_t p = 0; p < plane; ++p) fnext[p] -= rt[p];
  }
}

// --- FLOW container ----------------------------------------------------------

namespace {
void put_u16f(std::string& b, std::uint16_t v) {
  b.push_back(char(v & 0xff));
  b.push_back(char((v >> 8) & 0xff));
}
void put_u32f(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(char((v >> (8 * i)) & 0xff));
}
std::uint16_t get_u16f(const unsigned char* p) {
  return std::uint16_t(p[0]) | (std::uint16_t(p[1]) << 8);
}
std::uint32_t get_u32f(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}
}  // namespace

void write_flow(const FlowField& flow, const std::string& path) {
  std::string buf;
  buf += "FLOW";
  put_u16f(buf, 1);
  put_u16f(buf, 0);  // float32
  put_u32f(buf, std::uint32_t(flow.rows));
  put_u32f(buf, std::uint32_t(flow.cols));
  put_u32f(buf, std::uint32_t(flow.transitions));
  put_u32f(buf, 0);
  buf.append(8, '\0');
  const std::size_t plane = std::size_t(flow.rows) * flow.cols;
  auto put_plane = [&](const double* p) {
    for (std::size_t i = 0; i < plane; ++i) {
      const float f = float(p[i]);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_u32f(buf, bits);
    }
  };
  for (int t = 0; t < flow.transitions; ++t) {
    put_plane(flow.v1_plane(t));
    put_plane(flow.v2_plane(t));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f.write(buf.data(), std::streamsize(buf.size()));
  if (!f) throw FormatError("short write: " + path);
}

FlowField read_flow(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open: " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 32) throw FormatError("truncated header: " + path);
  if (std::memcmp(raw.data(), "FLOW", 4) != 0)
    throw FormatError("magic mismatch (not a FLOW file): " + path);
  if (get_u16f(raw.data() + 4) != 1 || get_u16f(raw.data() + 6) != 0)
    throw FormatError("unsupported FLOW version/dtype: " + path);
  FlowField flow;
  flow.rows = int(get_u32f(raw.data() + 8));
  flow.cols = int(get_u32f(raw.data() + 12));
  flow.transitions = int(get_u32f(raw.data() + 16));
  const std::size_t plane = std::size_t(flow.rows) * flow.cols;
  const std::size_t need = 32 + plane * flow.transitions * 2 * 4;
  if (raw.size() < need) throw FormatError("truncated payload: " + path);
  flow.v1.resize(plane * flow.transitions);
  flow.v2.resize(plane * flow.transitions);
  const unsigned char* p = raw.data() + 32;
  auto get_plane = [&](double* dst) {
    for (std::size_t i = 0; i < plane; ++i, p += 4) {
      std::uint32_t bits = get_u32f(p);
      float fv;
      std::memcpy(&fv, &bits, 4);
      dst[i] = double(fv);
    }
  };
  for (int t = 0; t < flow.transitions; ++t) {
    get_plane(flow.v1_plane(t));
    get_plane(flow.v2_plane(t));
  }
  return flow;
}

}  // namespace cake
