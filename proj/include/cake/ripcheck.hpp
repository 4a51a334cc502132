#ifndef CAKE_RIPCHECK_HPP
#define CAKE_RIPCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cake/masks.hpp"
#include "cake/operators.hpp"

namespace cake {

// Dense single-exposure-block sensing matrix A = [A_1 ... A_B] (m x n*B),
// assembled column by column from the first block of the mask sequence.
std::vector<double> assemble_block_operator(const MaskSequence& masks,
                                            Downsampler kind,
                                            const std::vector<double>* signs =
                                                nullptr);

// Dense Gram matrix G = A^T A of the single-block operator; guarded at
// n*B <= 4096 to keep the assembly desk-scale.
std::vector<double> gram_matrix(const MaskSequence& masks, Downsampler kind);

struct GramStats {
  SamplingGeometry geometry;
  MaskFamily family = MaskFamily::Rademacher;
  int trials = 0;
  double delta_d = 0.0, delta_o = 0.0;
  int s = 2;

  std::int64_t diag_count = 0, diag_exceed = 0;
  std::int64_t off_count = 0, off_exceed = 0;
  // same-frame off-diagonal entries split by the index classes of the
  // dependence analysis: "aligned" means p-q = 0 mod d along both axes
  std::int64_t aligned_count = 0, aligned_exceed = 0;
  std::int64_t unaligned_count = 0, unaligned_exceed = 0;

  double max_diag_dev = 0.0;
  double max_offdiag = 0.0;

  double diag_bound() const;  // 2 exp(-2 n delta_d^2 / d)
  double off_bound() const;   // 4 exp(-n delta_o^2 / (4 d s^2))
  double diag_rate() const {
    return diag_count ? double(diag_exceed) / double(diag_count) : 0.0;
  }
  double off_rate() const {
    return off_count ? double(off_exceed) / double(off_count) : 0.0;
  }

  std::string summary() const;  // key=value block
};

// Monte-Carlo Gram concentration versus the analytic exponential bounds.
// Uses one exposure block of the given geometry; trials draw fresh masks
// from `family` with seeds seed, seed+1, ...
GramStats concentration_report(const SamplingGeometry& g, MaskFamily family,
                               int trials, double delta_d, double delta_o,
                               int s, std::uint64_t seed,
                               Downsampler kind = Downsampler::Subsample);

// Maximum over supports of the disc-based eigenvalue deviation bound
// max_j(|G_jj - 1| + sum_{i != j} |G_ij|) on s x s principal minors.
// Supports are enumerated exhaustively when C(nB, s) <= max_supports,
// otherwise max_supports seeded random supports are used; the same
// enumeration is shared with exact_rip_delta so the two are comparable.
double gersgorin_delta_bound(const std::vector<double>& gram, int nB, int s,
                             std::int64_t max_supports, std::uint64_t seed);

// Exact restricted-isometry constant over the same supports:
// max over supports of max(lambda_max - 1, 1 - lambda_min) of the minor.
double exact_rip_delta(const std::vector<double>& gram, int nB, int s,
                       std::int64_t max_supports, std::uint64_t seed);

// Number of s-subsets, saturating at a large sentinel to avoid overflow.
std::int64_t support_count(int nB, int s);

// Eigenvalues of a small dense symmetric matrix (cyclic Jacobi).
void symmetric_eigenvalues(std::vector<double> matrix, int sdim,
                           std::vector<double>& evals);

}  // namespace cake

#endif
