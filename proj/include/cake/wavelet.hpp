#ifndef CAKE_WAVELET_HPP
#define CAKE_WAVELET_HPP

#include "cake/errors.hpp"

namespace cake {

// Orthonormal 2-D Daubechies-4 transform with periodic boundaries, standard
// Mallat layout. forward() is the analysis map (W^T), inverse() the
// synthesis; the two are exact inverses and preserve the 2-norm.
class WaveletTransform {
 public:
  // levels == 0 picks the maximum depth the frame size allows; both
  // dimensions must stay even at every requested level.
  WaveletTransform(int rows, int cols, int levels = 0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int levels() const { return levels_; }

  void forward(const double* img, double* coef) const;
  void inverse(const double* coef, double* img) const;

  static int max_levels(int rows, int cols);

 private:
  int rows_, cols_, levels_;
};

}  // namespace cake

#endif
