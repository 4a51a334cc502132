#include "cake/fft.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace cake {
namespace fft {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct Plan {
  int n = 1;
  bool pow2 = true;
  std::vector<int> rev;       // bit-reversal permutation (pow2 only)
  std::vector<cplx> twiddle;  // exp(-2*pi*i*k/n), k < n/2 (pow2 only)
  // Bluestein auxiliaries
  int nfft = 0;
  std::vector<cplx> chirp;      // exp(-pi*i*k^2/n), k < n
  std::vector<cplx> kernel_ft;  // forward FFT of the chirp kernel, size nfft
};

void build_pow2(Plan& p) {
  const int n = p.n;
  p.rev.assign(n, 0);
  int logn = 0;
  while ((1 << logn) < n) ++logn;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < logn; ++b)
      if (i & (1 << b)) r |= 1 << (logn - 1 - b);
    p.rev[i] = r;
  }
  p.twiddle.resize(n / 2 > 0 ? n / 2 : 1);
  for (int k = 0; k < n / 2; ++k) {
    const double ang = -2.0 * std::numbers::pi * k / n;
    p.twiddle[k] = {std::cos(ang), std::sin(ang)};
  }
}

void pow2_forward(const Plan& p, cplx* x) {
  const int n = p.n;
  for (int i = 0; i < n; ++i) {
    const int j = p.rev[i];
    if (i < j) std::swap(x[i], x[j]);
  }
  // explicit real/imag butterflies keep this free of __muldc3 calls
  double* d = reinterpret_cast<double*>(x);
  const double* tw = reinterpret_cast<const double*>(p.twiddle.data());
  for (int len = 2; len <= n; len <<= 1) {
    const int half = len >> 1;
    const int step = n / len;
    for (int blk = 0; blk < n; blk += len) {
      for (int k = 0; k < half; ++k) {
        const std::size_t wi = std::size_t(k) * step * 2;
        const double wr = tw[wi], wim = tw[wi + 1];
        const std::size_t a = std::size_t(blk + k) * 2;
        const std::size_t b = std::size_t(blk + k + half) * 2;
        const double br = d[b], bi = d[b + 1];
        const double vr = br * wr - bi * wim;
        const double vi = br * wim + bi * wr;
        const double ur = d[a], ui = d[a + 1];
        d[a] = ur + vr;
        d[a + 1] = ui + vi;
        d[b] = ur - vr;
        d[b + 1] = ui - vi;
      }
    }
  }
}

const Plan& plan_for(int n);

// Arbitrary-size forward transform via the chirp-z factorization; the length
// is padded to a power of two >= 2n-1 and the convolution runs through the
// pow2 path.
void bluestein_forward(const Plan& p, cplx* x) {
  const int n = p.n;
  const int nfft = p.nfft;
  const Plan& fp = plan_for(nfft);
  std::vector<cplx> a(nfft, cplx(0.0, 0.0));
  for (int k = 0; k < n; ++k) a[k] = x[k] * p.chirp[k];
  pow2_forward(fp, a.data());
  for (int k = 0; k < nfft; ++k) a[k] *= p.kernel_ft[k];
  // inverse pow2 via conjugation
  for (auto& v : a) v = std::conj(v);
  pow2_forward(fp, a.data());
  const double scale = 1.0 / nfft;
  for (int k = 0; k < n; ++k)
    x[k] = std::conj(a[k]) * scale * p.chirp[k];
}

void build_bluestein(Plan& p) {
  const int n = p.n;
  p.nfft = next_pow2(2 * n - 1);
  p.chirp.resize(n);
  for (int k = 0; k < n; ++k) {
    const std::int64_t k2 = (std::int64_t(k) * k) % (2 * std::int64_t(n));
    const double ang = -std::numbers::pi * double(k2) / n;
    p.chirp[k] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cplx> b(p.nfft, cplx(0.0, 0.0));
  b[0] = std::conj(p.chirp[0]);
  for (int k = 1; k < n; ++k) {
    b[k] = std::conj(p.chirp[k]);
    b[p.nfft - k] = std::conj(p.chirp[k]);
  }
  const Plan& fp = plan_for(p.nfft);
  pow2_forward(fp, b.data());
  p.kernel_ft = std::move(b);
}

std::mutex g_plan_mutex;
std::map<int, std::unique_ptr<Plan>> g_plans;

const Plan& plan_for(int n) {
  thread_local const Plan* last = nullptr;
  if (last && last->n == n) return *last;
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = g_plans.find(n);
    if (it != g_plans.end()) {
      last = it->second.get();
      return *last;
    }
  }
  auto plan = std::make_unique<Plan>();
  plan->n = n;
  plan->pow2 = is_pow2(n);
  if (plan->pow2)
    build_pow2(*plan);
  else
    build_bluestein(*plan);  // recurses into plan_for(nfft) before insertion
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = g_plans.find(n);
  if (it == g_plans.end())
    it = g_plans.emplace(n, std::move(plan)).first;
  last = it->second.get();
  return *last;
}

}  // namespace

void prepare(int n) { plan_for(n); }

void transform(cplx* x, int n, bool inverse) {
  if (n <= 1) return;
  const Plan& p = plan_for(n);
  if (!inverse) {
    if (p.pow2)
      pow2_forward(p, x);
    else
      bluestein_forward(p, x);
    return;
  }
  for (int i = 0; i < n; ++i) x[i] = std::conj(x[i]);
  if (p.pow2)
    pow2_forward(p, x);
  else
    bluestein_forward(p, x);
  const double scale = 1.0 / n;
  for (int i = 0; i < n; ++i) x[i] = std::conj(x[i]) * scale;
}

void transform_2d(cplx* x, int rows, int cols, bool inverse) {
  for (int r = 0; r < rows; ++r)
    transform(x + std::size_t(r) * cols, cols, inverse);
  if (rows == 1) return;
  // column pass via transpose so the 1-D transforms stay unit-stride
  thread_local std::vector<cplx> tr;
  tr.resize(std::size_t(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      tr[std::size_t(c) * rows + r] = x[std::size_t(r) * cols + c];
  for (int c = 0; c < cols; ++c)
    transform(tr.data() + std::size_t(c) * rows, rows, inverse);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r)
      x[std::size_t(r) * cols + c] = tr[std::size_t(c) * rows + r];
}

std::vector<cplx> forward_2d(const double* img, int rows, int cols) {
  std::vector<cplx> spec(std::size_t(rows) * cols);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] = cplx(img[i], 0.0);
  transform_2d(spec.data(), rows, cols, false);
  return spec;
}

void inverse_2d_real(std::vector<cplx> spec, int rows, int cols, double* out) {
  transform_2d(spec.data(), rows, cols, true);
  for (std::size_t i = 0; i < spec.size(); ++i) out[i] = spec[i].real();
}

void forward_2d_into(const double* img, int rows, int cols, cplx* spec) {
  const std::size_t count = std::size_t(rows) * cols;
  for (std::size_t i = 0; i < count; ++i) spec[i] = cplx(img[i], 0.0);
  transform_2d(spec, rows, cols, false);
}

void inverse_2d_real_into(cplx* spec, int rows, int cols, double* out) {
  transform_2d(spec, rows, cols, true);
  const std::size_t count = std::size_t(rows) * cols;
  for (std::size_t i = 0; i < count; ++i) out[i] = spec[i].real();
}

void convolve_2d(const double* img, const double* kernel, double* out,
                 int rows, int cols) {
  auto fi = forward_2d(img, rows, cols);
  auto fk = forward_2d(kernel, rows, cols);
  for (std::size_t i = 0; i < fi.size(); ++i) fi[i] *= fk[i];
  inverse_2d_real(std::move(fi), rows, cols, out);
}

}  // namespace fft
}  // namespace cake
