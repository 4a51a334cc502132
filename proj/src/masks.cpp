#include "cake/masks.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "cake/errors.hpp"
#include "cake/fft.hpp"
#include "cake/rng.hpp"

namespace cake {

namespace {

// Conjugate-symmetric unit-modulus spectrum: self-paired bins are +-1, every
// other bin gets a uniform random phase with its partner set to the
// conjugate. Bins are visited row-major so the stream of draws is fixed.
std::vector<std::complex<double>> random_phase_spectrum(int p1, int p2,
                                                        Rng& rng) {
  std::vector<std::complex<double>> sigma(std::size_t(p1) * p2);
  for (int k1 = 0; k1 < p1; ++k1) {
    for (int k2 = 0; k2 < p2; ++k2) {
      const int j1 = (p1 - k1) % p1;
      const int j2 = (p2 - k2) % p2;
      const std::size_t idx = std::size_t(k1) * p2 + k2;
      const std::size_t jdx = std::size_t(j1) * p2 + j2;
      if (idx == jdx) {
        sigma[idx] = {double(rng.sign()), 0.0};
      } else if (idx < jdx) {
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        sigma[idx] = {std::cos(phi), std::sin(phi)};
        sigma[jdx] = std::conj(sigma[idx]);
      }
    }
  }
  return sigma;
}

std::vector<double> kernel_from_spectrum(
    const std::vector<std::complex<double>>& sigma, int p1, int p2) {
  std::vector<std::complex<double>> buf = sigma;
  fft::transform_2d(buf.data(), p1, p2, true);
  std::vector<double> h(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) h[i] = buf[i].real();
  return h;
}

void replicate_blocks(const std::vector<double>& coarse, int m1, int m2,
                      int d1, int d2, double* out) {
  const int n2 = m2 * d2;
  for (int i = 0; i < m1; ++i)
    for (int a = 0; a < d1; ++a)
      for (int j = 0; j < m2; ++j)
        for (int b = 0; b < d2; ++b)
          out[(i * d1 + a) * n2 + (j * d2 + b)] = coarse[i * m2 + j];
}

void fill_highres_frame(const SamplingGeometry& g, double value, Rng& rng,
                        double* out) {
  const int d = g.d();
  std::vector<int> slots(d);
  for (int bi = 0; bi < g.m1; ++bi) {
    for (int bj = 0; bj < g.m2; ++bj) {
      for (int s = 0; s < d; ++s) slots[s] = s;
      rng.shuffle(slots);
      for (int s = 0; s < d; ++s) {
        const int a = slots[s] / g.d2;
        const int b = slots[s] % g.d2;
        out[(bi * g.d1 + a) * g.n2 + (bj * g.d2 + b)] =
            (s < d / 2) ? value : -value;
      }
    }
  }
}

}  // namespace

MaskSequence gen_rademacher(const SamplingGeometry& g, std::uint64_t seed) {
  MaskSequence seq;
  seq.geometry = g;
  seq.family = MaskFamily::Rademacher;
  seq.seed = seed;
  seq.masks.resize(std::size_t(g.N) * g.n());
  const double v = std::sqrt(double(g.d()) / double(g.n()));
  Rng rng(seed);
  for (double& x : seq.masks) x = v * rng.sign();
  return seq;
}

std::vector<double> gen_phase_shift(
    int p1, int p2, std::uint64_t seed,
    std::vector<std::complex<double>>* sigma_out) {
  if (p1 <= 0 || p2 <= 0)
    throw DimensionError("gen_phase_shift: non-positive size");
  Rng rng(seed);
  auto sigma = random_phase_spectrum(p1, p2, rng);
  auto h = kernel_from_spectrum(sigma, p1, p2);
  if (sigma_out) *sigma_out = std::move(sigma);
  return h;
}

MaskSequence gen_phase_shift_sequence(const SamplingGeometry& g,
                                      std::uint64_t seed) {
  MaskSequence seq;
  seq.geometry = g;
  seq.family = MaskFamily::PhaseShift;
  seq.seed = seed;
  seq.masks.resize(std::size_t(g.N) * g.n());
  Rng rng(seed);
  for (int t = 0; t < g.N; ++t) {
    auto sigma = random_phase_spectrum(g.n1, g.n2, rng);
    auto h = kernel_from_spectrum(sigma, g.n1, g.n2);
    std::copy(h.begin(), h.end(), seq.masks.begin() + std::size_t(t) * g.n());
  }
  return seq;
}

MaskSequence gen_dsm(const SamplingGeometry& g, double alpha, double beta,
                     std::uint64_t seed) {
  if (g.d() % 2 != 0)
    throw BlockParityError(
        "gen_dsm: d1*d2 = " + std::to_string(g.d()) +
        " is odd; blocks cannot split half positive / half negative");
  const double s = alpha * alpha + beta * beta;
  if (std::fabs(s - 1.0) > 1e-3)
    throw ConfigError("gen_dsm: alpha^2+beta^2 = " + std::to_string(s) +
                      " is not within 1e-3 of 1");
  const double renorm = 1.0 / std::sqrt(s);
  alpha *= renorm;
  beta *= renorm;

  MaskSequence seq;
  seq.geometry = g;
  seq.family = MaskFamily::Dsm;
  seq.seed = seed;
  seq.dsm.alpha = alpha;
  seq.dsm.beta = beta;
  seq.dsm.lowres_scale = 1.0 / std::sqrt(double(g.m()));

  Rng rng(seed);
  seq.dsm.sigma.reserve(g.M);
  seq.dsm.lowres.resize(std::size_t(g.M) * g.n());
  for (int k = 0; k < g.M; ++k) {
    auto sigma = random_phase_spectrum(g.m1, g.m2, rng);
    auto gk = kernel_from_spectrum(sigma, g.m1, g.m2);
    replicate_blocks(gk, g.m1, g.m2, g.d1, g.d2,
                     seq.dsm.lowres.data() + std::size_t(k) * g.n());
    seq.dsm.sigma.push_back(std::move(sigma));
  }

  const double v = std::sqrt(double(g.d()) / double(g.n()));
  seq.dsm.highres.resize(std::size_t(g.N) * g.n());
  for (int t = 0; t < g.N; ++t)
    fill_highres_frame(g, v, rng,
                       seq.dsm.highres.data() + std::size_t(t) * g.n());

  seq.masks.resize(std::size_t(g.N) * g.n());
  for (int t = 0; t < g.N; ++t) {
    const int k = t / g.B;
    const double* lo = seq.dsm.lowres.data() + std::size_t(k) * g.n();
    const double* hi = seq.dsm.highres.data() + std::size_t(t) * g.n();
    double* h = seq.masks.data() + std::size_t(t) * g.n();
    for (std::int64_t i = 0; i < g.n(); ++i)
      h[i] = alpha * lo[i] + beta * hi[i];
  }
  return seq;
}

PhysicalMask to_physical(const double* mask, std::int64_t count,
                         const SamplingGeometry& g) {
  const double v = std::sqrt(double(g.d()) / double(g.n()));
  for (std::int64_t i = 0; i < count; ++i) {
    if (std::fabs(std::fabs(mask[i]) - v) > 1e-12 * v)
      throw UnsupportedMaskError(
          "to_physical: mask is not binary-valued +-sqrt(d/n)");
  }
  PhysicalMask p;
  p.scale = 1.0 / (2.0 * v * g.n());
  p.offset = 1.0 / (2.0 * g.n());
  p.values.resize(count);
  for (std::int64_t i = 0; i < count; ++i)
    p.values[i] = p.scale * mask[i] + p.offset;
  return p;
}

void physical_to_signed(const PhysicalMask& physical, double* out) {
  for (std::size_t i = 0; i < physical.values.size(); ++i)
    out[i] = (physical.values[i] - physical.offset) / physical.scale;
}

namespace {

constexpr std::uint16_t kMaskVersion = 1;

void put_u16(std::string& b, std::uint16_t v) {
  b.push_back(char(v & 0xff));
  b.push_back(char((v >> 8) & 0xff));
}
void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(char((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(char((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& b, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(b, bits);
}
std::uint16_t get_u16(const unsigned char* p) {
  return std::uint16_t(p[0]) | (std::uint16_t(p[1]) << 8);
}
std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}
std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}
double get_f64(const unsigned char* p) {
  std::uint64_t bits = get_u64(p);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace

void write_masks(const MaskSequence& seq, const std::string& path) {
  const SamplingGeometry& g = seq.geometry;
  std::string buf;
  buf += "MSKS";
  put_u16(buf, kMaskVersion);
  put_u16(buf, std::uint16_t(seq.family));
  put_u32(buf, std::uint32_t(g.n1));
  put_u32(buf, std::uint32_t(g.n2));
  put_u32(buf, std::uint32_t(g.N));
  put_u32(buf, std::uint32_t(g.d1));
  put_u32(buf, std::uint32_t(g.d2));
  put_u32(buf, std::uint32_t(g.B));
  put_u64(buf, seq.seed);
  put_f64(buf, seq.dsm.alpha);
  put_f64(buf, seq.dsm.beta);
  put_u32(buf, 0);       // flags
  buf.append(4, '\0');   // pad to 64 bytes
  for (double v : seq.masks) put_f64(buf, v);
  if (seq.family == MaskFamily::Dsm) {
    for (const auto& plane : seq.dsm.sigma) {
      for (const auto& z : plane) {
        put_f64(buf, z.real());
        put_f64(buf, z.imag());
      }
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f.write(buf.data(), std::streamsize(buf.size()));
  if (!f) throw FormatError("short write: " + path);
}

MaskSequence read_masks(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open: " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 64) throw FormatError("truncated header: " + path);
  if (std::memcmp(raw.data(), "MSKS", 4) != 0)
    throw FormatError("magic mismatch (not a MSKS file): " + path);
  if (get_u16(raw.data() + 4) != kMaskVersion)
    throw FormatError("unsupported MSKS version");
  const std::uint16_t family = get_u16(raw.data() + 6);
  const int n1 = int(get_u32(raw.data() + 8));
  const int n2 = int(get_u32(raw.data() + 12));
  const int N = int(get_u32(raw.data() + 16));
  const int d1 = int(get_u32(raw.data() + 20));
  const int d2 = int(get_u32(raw.data() + 24));
  const int B = int(get_u32(raw.data() + 28));

  MaskSequence seq;
  seq.geometry = make_geometry(n1, n2, N, d1, d2, B);
  const SamplingGeometry& g = seq.geometry;
  seq.family = MaskFamily(family);
  seq.seed = get_u64(raw.data() + 32);
  const double alpha = get_f64(raw.data() + 40);
  const double beta = get_f64(raw.data() + 48);

  const std::size_t mask_count = std::size_t(g.N) * g.n();
  std::size_t need = 64 + mask_count * 8;
  const std::size_t sigma_count =
      seq.family == MaskFamily::Dsm ? std::size_t(g.M) * g.m() : 0;
  need += sigma_count * 16;
  if (raw.size() < need) throw FormatError("truncated payload: " + path);

  seq.masks.resize(mask_count);
  const unsigned char* p = raw.data() + 64;
  for (std::size_t i = 0; i < mask_count; ++i, p += 8)
    seq.masks[i] = get_f64(p);

  if (seq.family == MaskFamily::Dsm) {
    seq.dsm.alpha = alpha;
    seq.dsm.beta = beta;
    seq.dsm.lowres_scale = 1.0 / std::sqrt(double(g.m()));
    seq.dsm.sigma.resize(g.M);
    for (int k = 0; k < g.M; ++k) {
      auto& plane = seq.dsm.sigma[k];
      plane.resize(g.m());
      for (std::int64_t i = 0; i < g.m(); ++i, p += 16)
        plane[i] = {get_f64(p), get_f64(p + 8)};
    }
    // rebuild h^L from sigma, then h^H from the stored combination
    seq.dsm.lowres.resize(std::size_t(g.M) * g.n());
    for (int k = 0; k < g.M; ++k) {
      auto gk = kernel_from_spectrum(seq.dsm.sigma[k], g.m1, g.m2);
      replicate_blocks(gk, g.m1, g.m2, g.d1, g.d2,
                       seq.dsm.lowres.data() + std::size_t(k) * g.n());
    }
    seq.dsm.highres.assign(std::size_t(g.N) * g.n(), 0.0);
    if (beta != 0.0) {
      for (int t = 0; t < g.N; ++t) {
        const int k = t / g.B;
        const double* lo = seq.dsm.lowres.data() + std::size_t(k) * g.n();
        const double* h = seq.masks.data() + std::size_t(t) * g.n();
        double* hi = seq.dsm.highres.data() + std::size_t(t) * g.n();
        for (std::int64_t i = 0; i < g.n(); ++i)
          hi[i] = (h[i] - alpha * lo[i]) / beta;
      }
    }
  }
  return seq;
}

}  // namespace cake
