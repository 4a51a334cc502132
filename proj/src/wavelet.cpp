#include "cake/wavelet.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace cake {

namespace {

// Daubechies-4 analysis pair
const double kSqrt3 = std::sqrt(3.0);
const double kNorm = 4.0 * std::sqrt(2.0);
const double H[4] = {(1.0 + kSqrt3) / kNorm, (3.0 + kSqrt3) / kNorm,
                     (3.0 - kSqrt3) / kNorm, (1.0 - kSqrt3) / kNorm};
const double G[4] = {H[3], -H[2], H[1], -H[0]};

// One periodic analysis step: x (len, strided) -> [approx | detail] halves.
void analyze_line(double* x, int len, int stride, std::vector<double>& tmp) {
  const int half = len / 2;
  tmp.resize(len);
  for (int i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double v = x[((2 * i + k) % len) * stride];
      a += H[k] * v;
      d += G[k] * v;
    }
    tmp[i] = a;
    tmp[half + i] = d;
  }
  for (int i = 0; i < len; ++i) x[i * stride] = tmp[i];
}

void synthesize_line(double* x, int len, int stride, std::vector<double>& tmp) {
  const int half = len / 2;
  tmp.assign(len, 0.0);
  for (int i = 0; i < half; ++i) {
    const double a = x[i * stride];
    const double d = x[(half + i) * stride];
    for (int k = 0; k < 4; ++k) {
      tmp[(2 * i + k) % len] += H[k] * a + G[k] * d;
    }
  }
  for (int i = 0; i < len; ++i) x[i * stride] = tmp[i];
}

}  // namespace

int WaveletTransform::max_levels(int rows, int cols) {
  int levels = 0;
  while (rows % 2 == 0 && cols % 2 == 0 && rows >= 2 && cols >= 2) {
    ++levels;
    rows /= 2;
    cols /= 2;
  }
  return levels;
}

WaveletTransform::WaveletTransform(int rows, int cols, int levels)
    : rows_(rows), cols_(cols), levels_(levels) {
  const int maxl = max_levels(rows, cols);
  if (levels_ == 0) levels_ = maxl;
  if (levels_ < 0 || levels_ > maxl)
    throw DimensionError("wavelet: " + std::to_string(levels) +
                         " levels requested but " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " supports at most " +
                         std::to_string(maxl));
}

void WaveletTransform::forward(const double* img, double* coef) const {
  std::memcpy(coef, img, sizeof(double) * std::size_t(rows_) * cols_);
  std::vector<double> tmp;
  int r = rows_, c = cols_;
  for (int l = 0; l < levels_; ++l) {
    for (int i = 0; i < r; ++i) analyze_line(coef + std::size_t(i) * cols_, c, 1, tmp);
    for (int j = 0; j < c; ++j) analyze_line(coef + j, r, cols_, tmp);
    r /= 2;
    c /= 2;
  }
}

void WaveletTransform::inverse(const double* coef, double* img) const {
  std::memcpy(img, coef, sizeof(double) * std::size_t(rows_) * cols_);
  std::vector<double> tmp;
  // replay the level sizes in reverse
  std::vector<std::pair<int, int>> sizes;
  int r = rows_, c = cols_;
  for (int l = 0; l < levels_; ++l) {
    sizes.emplace_back(r, c);
    r /= 2;
    c /= 2;
  }
  for (int l = levels_ - 1; l >= 0; --l) {
    const auto [rr, cc] = sizes[l];
    for (int j = 0; j < cc; ++j) synthesize_line(img + j, rr, cols_, tmp);
    for (int i = 0; i < rr; ++i)
      synthesize_line(img + std::size_t(i) * cols_, cc, 1, tmp);
  }
}

}  // namespace cake
