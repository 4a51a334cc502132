#include "cake/reference.hpp"

namespace cake {
namespace ref {

void direct_convolve_2d(const double* img, const double* kernel, double* out,
                        int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double s = 0.0;
      for (int p = 0; p < rows; ++p) {
        const int ki = ((i - p) % rows + rows) % rows;
        for (int q = 0; q < cols; ++q) {
          const int kj = ((j - q) % cols + cols) % cols;
          s += img[p * cols + q] * kernel[ki * cols + kj];
        }
      }
      out[i * cols + j] = s;
    }
  }
}

void direct_correlate_2d(const double* img, const double* kernel, double* out,
                         int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double s = 0.0;
      for (int p = 0; p < rows; ++p) {
        const int ki = ((p - i) % rows + rows) % rows;
        for (int q = 0; q < cols; ++q) {
          const int kj = ((q - j) % cols + cols) % cols;
          s += img[p * cols + q] * kernel[ki * cols + kj];
        }
      }
      out[i * cols + j] = s;
    }
  }
}

void direct_subsample(const double* img, int n1, int n2, int d1, int d2,
                      int p1, int p2, double* out) {
  const int m1 = n1 / d1, m2 = n2 / d2;
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j)
      out[i * m2 + j] = img[(i * d1 + p1) * n2 + (j * d2 + p2)];
}

void direct_integrate(const double* img, int n1, int n2, int d1, int d2,
                      double* out) {
  const int m1 = n1 / d1, m2 = n2 / d2;
  for (int i = 0; i < m1; ++i) {
    for (int j = 0; j < m2; ++j) {
      double s = 0.0;
      for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) s += img[(i * d1 + a) * n2 + (j * d2 + b)];
      out[i * m2 + j] = s;
    }
  }
}

}  // namespace ref
}  // namespace cake
