#ifndef CAKE_MASKS_HPP
#define CAKE_MASKS_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cake/geometry.hpp"

namespace cake {

enum class MaskFamily : std::uint16_t {
  Rademacher = 0,
  PhaseShift = 1,
  Dsm = 2,
};

// Dual-scale bookkeeping: the per-block low-resolution phase sequences
// sigma_k (shared by all B frames of block k), the replicated low-res masks
// h^L, and the per-frame zero-sum high-res masks h^H. The combined mask is
// h_t = alpha * h^L_{k(t)} + beta * h^H_t.
struct DsmParams {
  double alpha = 1.0;
  double beta = 0.0;
  // Scale applied to the unitary-convention inverse DFT of sigma_k when
  // forming h^L (equals 1/sqrt(m)); with it, ||h^L||^2 = n/m.
  double lowres_scale = 0.0;
  std::vector<std::vector<std::complex<double>>> sigma;  // M planes, m1*m2
  std::vector<double> lowres;   // M planes of n1*n2 (h^L_k)
  std::vector<double> highres;  // N planes of n1*n2 (h^H_t)
};

struct MaskSequence {
  SamplingGeometry geometry;
  MaskFamily family = MaskFamily::Rademacher;
  std::uint64_t seed = 0;
  std::vector<double> masks;  // N planes of n1*n2 (h_t)
  DsmParams dsm;              // populated iff family == Dsm

  const double* mask(int t) const {
    return masks.data() + std::size_t(t) * geometry.n();
  }
};

// Entries +-sqrt(d/n) with probability 1/2 each, iid across pixels and
// frames; ||h_t||^2 = n/m exactly.
MaskSequence gen_rademacher(const SamplingGeometry& g, std::uint64_t seed);

// Single real convolution kernel with unit-modulus spectrum: conjugate
// symmetric random phases, DC (and Nyquist bins, when the size is even)
// forced to +-1. Optionally returns the spectrum.
std::vector<double> gen_phase_shift(
    int p1, int p2, std::uint64_t seed,
    std::vector<std::complex<double>>* sigma_out = nullptr);

// One independent phase-shift kernel per frame at full resolution.
MaskSequence gen_phase_shift_sequence(const SamplingGeometry& g,
                                      std::uint64_t seed);

// Dual-scale masks. alpha^2 + beta^2 must be within 1e-3 of 1 (the pair is
// renormalized onto the sphere); d = d1*d2 must be even so each block splits
// exactly half positive / half negative.
MaskSequence gen_dsm(const SamplingGeometry& g, double alpha, double beta,
                     std::uint64_t seed);

// Affine remap of a binary +-sqrt(d/n) mask onto [0, 1/n] (flux-preserving
// physical aperture). `scale` and `offset` record the map p = scale*h + offset
// so it can be inverted exactly.
struct PhysicalMask {
  std::vector<double> values;
  double scale = 0.0;
  double offset = 0.0;
};
PhysicalMask to_physical(const double* mask, std::int64_t count,
                         const SamplingGeometry& g);
void physical_to_signed(const PhysicalMask& physical, double* out);

// "MSKS" container: 64-byte header
//   magic "MSKS" | u16 version | u16 family | u32 n1,n2,N,d1,d2,B |
//   u64 seed | f64 alpha | f64 beta | u32 flags | 4 pad bytes
// payload: N masks float64; for dsm additionally M sigma planes as
// interleaved re/im float64. h^L and h^H are recomputed on load.
void write_masks(const MaskSequence& seq, const std::string& path);
MaskSequence read_masks(const std::string& path);

}  // namespace cake

#endif
