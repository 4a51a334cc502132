#include "cake/ripcheck.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>

#include "cake/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cake {

namespace {

// Column (t, k1, k2) of the single-block operator, written into `col` (size m).
// The column is the downsampled circular shift of h_t by (k1, k2).
void operator_column(const SamplingGeometry& g, const double* h, int k1,
                     int k2, Downsampler kind, const std::vector<double>* signs,
                     int p1, int p2, double* col) {
  const int m1 = g.m1, m2 = g.m2;
  for (int l1 = 0; l1 < m1; ++l1) {
    for (int l2 = 0; l2 < m2; ++l2) {
      double v = 0.0;
      switch (kind) {
        case Downsampler::Subsample: {
          const int i1 = (l1 * g.d1 + p1 - k1 % g.n1 + g.n1) % g.n1;
          const int i2 = (l2 * g.d2 + p2 - k2 % g.n2 + g.n2) % g.n2;
          v = h[i1 * g.n2 + i2];
          break;
        }
        case Downsampler::Integrate:
        case Downsampler::RandomDemod:
        case Downsampler::RandomDemodBinary: {
          for (int a = 0; a < g.d1; ++a) {
            for (int b = 0; b < g.d2; ++b) {
              const int pos1 = l1 * g.d1 + a;
              const int pos2 = l2 * g.d2 + b;
              const int i1 = (pos1 - k1 % g.n1 + g.n1) % g.n1;
              const int i2 = (pos2 - k2 % g.n2 + g.n2) % g.n2;
              double s = 1.0;
              if (kind != Downsampler::Integrate)
                s = (*signs)[pos1 * g.n2 + pos2];
              v += s * h[i1 * g.n2 + i2];
            }
          }
          break;
        }
      }
      col[l1 * m2 + l2] = v;
    }
  }
}

}  // namespace

std::vector<double> assemble_block_operator(const MaskSequence& masks,
                                            Downsampler kind,
                                            const std::vector<double>* signs) {
  const SamplingGeometry& g = masks.geometry;
  const std::int64_t nB = g.n() * g.B;
  const std::int64_t m = g.m();
  std::vector<double> A(std::size_t(m) * nB);
  std::vector<double> col(m);
  const int p1 = g.d1 - 1, p2 = g.d2 - 1;
  std::vector<double> ones;
  if ((kind == Downsampler::RandomDemod ||
       kind == Downsampler::RandomDemodBinary) &&
      signs == nullptr) {
    ones.assign(g.n(), 1.0);
    signs = &ones;
  }
  for (int t = 0; t < g.B; ++t) {
    const double* h = masks.mask(t);
    for (int k1 = 0; k1 < g.n1; ++k1) {
      for (int k2 = 0; k2 < g.n2; ++k2) {
        const std::int64_t j =
            std::int64_t(t) * g.n() + std::int64_t(k1) * g.n2 + k2;
        operator_column(g, h, k1, k2, kind, signs, p1, p2, col.data());
        for (std::int64_t l = 0; l < m; ++l) A[l * nB + j] = col[l];
      }
    }
  }
  return A;
}

std::vector<double> gram_matrix(const MaskSequence& masks, Downsampler kind) {
  const SamplingGeometry& g = masks.geometry;
  const std::int64_t nB = g.n() * g.B;
  if (nB > 4096)
    throw DimensionError("gram_matrix: nB = " + std::to_string(nB) +
                         " exceeds the 4096 dense-assembly guard");
  const std::int64_t m = g.m();
  std::vector<double> A = assemble_block_operator(masks, kind);
  std::vector<double> G(std::size_t(nB) * nB, 0.0);
  // rank-1 accumulation over measurement rows
  for (std::int64_t l = 0; l < m; ++l) {
    const double* row = A.data() + l * nB;
    for (std::int64_t p = 0; p < nB; ++p) {
      const double ap = row[p];
      if (ap == 0.0) continue;
      double* gp = G.data() + p * nB;
      for (std::int64_t q = p; q < nB; ++q) gp[q] += ap * row[q];
    }
  }
  for (std::int64_t p = 0; p < nB; ++p)
    for (std::int64_t q = 0; q < p; ++q) G[p * nB + q] = G[q * nB + p];
  return G;
}

double GramStats::diag_bound() const {
  const double n = double(geometry.n());
  return 2.0 * std::exp(-2.0 * n * delta_d * delta_d / geometry.d());
}

double GramStats::off_bound() const {
  const double n = double(geometry.n());
  return 4.0 *
         std::exp(-n * delta_o * delta_o / (4.0 * geometry.d() * s * s));
}

std::string GramStats::summary() const {
  char buf[1024];
  std::snprintf(
      buf, sizeof buf,
      "trials=%d\n"
      "n=%lld\nB=%d\nd=%d\ns=%d\n"
      "delta_d=%.6g\ndelta_o=%.6g\n"
      "diag_exceed=%lld\ndiag_count=%lld\ndiag_rate=%.8f\ndiag_bound=%.8f\n"
      "off_exceed=%lld\noff_count=%lld\noff_rate=%.8f\noff_bound=%.8f\n"
      "aligned_exceed=%lld\naligned_count=%lld\n"
      "unaligned_exceed=%lld\nunaligned_count=%lld\n"
      "max_diag_dev=%.8e\nmax_offdiag=%.8e\n",
      trials, (long long)geometry.n(), geometry.B, geometry.d(), s, delta_d,
      delta_o, (long long)diag_exceed, (long long)diag_count, diag_rate(),
      diag_bound(), (long long)off_exceed, (long long)off_count, off_rate(),
      off_bound(), (long long)aligned_exceed, (long long)aligned_count,
      (long long)unaligned_exceed, (long long)unaligned_count, max_diag_dev,
      max_offdiag);
  return buf;
}

GramStats concentration_report(const SamplingGeometry& g, MaskFamily family,
                               int trials, double delta_d, double delta_o,
                               int s, std::uint64_t seed, Downsampler kind) {
  if (trials < 1) throw DimensionError("concentration_report: trials < 1");
  // one exposure block
  SamplingGeometry gb = make_geometry(g.n1, g.n2, g.B, g.d1, g.d2, g.B);
  const std::int64_t nB = gb.n() * gb.B;
  if (nB > 4096)
    throw DimensionError("concentration_report: nB exceeds the dense guard");

  GramStats stats;
  stats.geometry = gb;
  stats.family = family;
  stats.trials = trials;
  stats.delta_d = delta_d;
  stats.delta_o = delta_o;
  stats.s = s;

  const double thr_off = delta_o / double(s);
  const std::int64_t n = gb.n();

  std::int64_t diag_exceed = 0, off_exceed = 0, aligned_exceed = 0,
               unaligned_exceed = 0, aligned_count = 0, unaligned_count = 0;
  double max_diag = 0.0, max_off = 0.0;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    reduction(+ : diag_exceed, off_exceed, aligned_exceed, unaligned_exceed, \
                  aligned_count, unaligned_count)                            \
    reduction(max : max_diag, max_off)
#endif
  for (int trial = 0; trial < trials; ++trial) {
    MaskSequence masks;
    const std::uint64_t trial_seed = seed + std::uint64_t(trial);
    switch (family) {
      case MaskFamily::Rademacher:
        masks = gen_rademacher(gb, trial_seed);
        break;
      case MaskFamily::PhaseShift:
        masks = gen_phase_shift_sequence(gb, trial_seed);
        break;
      case MaskFamily::Dsm:
        masks = gen_dsm(gb, 0.383, 0.924, trial_seed);
        break;
    }
    std::vector<double> G = gram_matrix(masks, kind);
    for (std::int64_t p = 0; p < nB; ++p) {
      const double dev = std::fabs(G[p * nB + p] - 1.0);
      max_diag = std::max(max_diag, dev);
      if (dev >= delta_d) ++diag_exceed;
      for (std::int64_t q = p + 1; q < nB; ++q) {
        const double mag = std::fabs(G[p * nB + q]);
        max_off = std::max(max_off, mag);
        if (mag >= thr_off) ++off_exceed;
        if (p / n == q / n) {
          // same frame: split by block-alignment of the pixel index offset
          const std::int64_t pp = p % n, qq = q % n;
          const int dr = int(pp / gb.n2 - qq / gb.n2);
          const int dc = int(pp % gb.n2 - qq % gb.n2);
          const bool aligned = (dr % gb.d1 == 0) && (dc % gb.d2 == 0);
          if (aligned) {
            ++aligned_count;
            if (mag >= thr_off) ++aligned_exceed;
          } else {
            ++unaligned_count;
            if (mag >= thr_off) ++unaligned_exceed;
          }
        }
      }
    }
  }

  stats.diag_count = std::int64_t(trials) * nB;
  stats.diag_exceed = diag_exceed;
  stats.off_count = std::int64_t(trials) * nB * (nB - 1) / 2;
  stats.off_exceed = off_exceed;
  stats.aligned_count = aligned_count;
  stats.aligned_exceed = aligned_exceed;
  stats.unaligned_count = unaligned_count;
  stats.unaligned_exceed = unaligned_exceed;
  stats.max_diag_dev = max_diag;
  stats.max_offdiag = max_off;
  return stats;
}

std::int64_t support_count(int nB, int s) {
  std::int64_t count = 1;
  for (int i = 0; i < s; ++i) {
    count = count * (nB - i) / (i + 1);
    if (count > (std::int64_t(1) << 60) / nB) return std::int64_t(1) << 60;
  }
  return count;
}

namespace {

void for_each_support(int nB, int s, std::int64_t max_supports,
                      std::uint64_t seed,
                      const std::function<void(const std::vector<int>&)>& fn) {
  const std::int64_t total = support_count(nB, s);
  std::vector<int> idx(s);
  if (total <= max_supports) {
    for (int i = 0; i < s; ++i) idx[i] = i;
    while (true) {
      fn(idx);
      int i = s - 1;
      while (i >= 0 && idx[i] == nB - s + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
  } else {
    Rng rng(seed);
    for (std::int64_t k = 0; k < max_supports; ++k) {
      // sample s distinct indices
      for (int i = 0; i < s; ++i) {
        bool fresh;
        do {
          idx[i] = int(rng.below(std::uint64_t(nB)));
          fresh = true;
          for (int j = 0; j < i; ++j)
            if (idx[j] == idx[i]) fresh = false;
        } while (!fresh);
      }
      fn(idx);
    }
  }
}

}  // namespace

double gersgorin_delta_bound(const std::vector<double>& gram, int nB, int s,
                             std::int64_t max_supports, std::uint64_t seed) {
  double bound = 0.0;
  for_each_support(nB, s, max_supports, seed, [&](const std::vector<int>& T) {
    double worst = 0.0;
    for (int j = 0; j < s; ++j) {
      double disc = std::fabs(gram[std::size_t(T[j]) * nB + T[j]] - 1.0);
      for (int i = 0; i < s; ++i)
        if (i != j) disc += std::fabs(gram[std::size_t(T[i]) * nB + T[j]]);
      worst = std::max(worst, disc);
    }
    bound = std::max(bound, worst);
  });
  return bound;
}

double exact_rip_delta(const std::vector<double>& gram, int nB, int s,
                       std::int64_t max_supports, std::uint64_t seed) {
  double delta = 0.0;
  std::vector<double> minor(std::size_t(s) * s), evals;
  for_each_support(nB, s, max_supports, seed, [&](const std::vector<int>& T) {
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        minor[std::size_t(i) * s + j] = gram[std::size_t(T[i]) * nB + T[j]];
    symmetric_eigenvalues(minor, s, evals);
    for (double lam : evals) delta = std::max(delta, std::fabs(lam - 1.0));
  });
  return delta;
}

void symmetric_eigenvalues(std::vector<double> a, int sdim,
                           std::vector<double>& evals) {
  // cyclic Jacobi; plenty for the tiny minors used here
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < sdim; ++p)
      for (int q = p + 1; q < sdim; ++q) off += a[p * sdim + q] * a[p * sdim + q];
    if (off < 1e-28) break;
    for (int p = 0; p < sdim; ++p) {
      for (int q = p + 1; q < sdim; ++q) {
        const double apq = a[p * sdim + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double app = a[p * sdim + p], aqq = a[q * sdim + q];
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = std::copysign(
            1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0)), theta);
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (int k = 0; k < sdim; ++k) {
          const double akp = a[k * sdim + p], akq = a[k * sdim + q];
          a[k * sdim + p] = c * akp - sn * akq;
          a[k * sdim + q] = sn * akp + c * akq;
        }
        for (int k = 0; k < sdim; ++k) {
          const double apk = a[p * sdim + k], aqk = a[q * sdim + k];
          a[p * sdim + k] = c * apk - sn * aqk;
          a[q * sdim + k] = sn * apk + c * aqk;
        }
      }
    }
  }
  evals.resize(sdim);
  for (int i = 0; i < sdim; ++i) evals[i] = a[i * sdim + i];
}

}  // namespace cake
