#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmdk/featureset.hpp"
#include "mmdk/matrix.hpp"

namespace mmdk {

// Gaussian patch kernel k(x, y) = exp(-|x - y|^2 / (4 sigma^2)). Note the
// denominator is 4 sigma^2, not the more common 2 sigma^2; the equivalent
// conventional bandwidth is sigma * sqrt(2).
struct PatchKernelConfig {
  double sigma = 10.0;
  std::size_t block_size = 256;  // patch rows streamed per Gram block

  void validate() const;
};

double patch_kernel(std::span<const double> x, std::span<const double> y,
                    const PatchKernelConfig& cfg);

// Squared MMD between two bags, biased V-statistic (self-pairs included):
//   mean_AA k + mean_BB k - 2 mean_AB k, clamped to 0 from below.
// The biased form makes mmd_sq(A, A) exactly 0, which the unit-diagonal
// kernel matrix construction relies on. Symmetric in its arguments bit-exactly
// (the cross term is evaluated once in a canonical argument order).
double mmd_sq(const FeatureSet& a, const FeatureSet& b, const PatchKernelConfig& cfg);

// All-pairs squared MMD. Each unordered pair is computed once and mirrored;
// per-set self terms are cached in a prior phase; the diagonal is written as
// exact zero. Pairs are dispatched over `threads` workers (0 = hardware).
DistanceMatrix distance_matrix(std::span<const FeatureSet> sets,
                               const PatchKernelConfig& cfg, unsigned threads = 0);

struct PsdReport {
  double min_eigenvalue = 0.0;  // before any jitter
  bool jitter_applied = false;
  double jitter = 0.0;
};

// K = exp(-gamma * D) entrywise, diagonal written as exact 1. The minimum
// eigenvalue is checked against -1e-6 * N; failures are remediated with
// diagonal jitter 1e-8 * trace / N and a warning on stderr (the kernel is PSD
// in exact arithmetic, so violations are numerical only).
KernelMatrix kernel_from_distance(const DistanceMatrix& dist, double gamma,
                                  PsdReport* report = nullptr);

// 1 / median of the strict upper triangle of D; the even-length median is the
// mean of the two central values. Throws NumericError when the median is zero.
double median_inverse_gamma(const DistanceMatrix& dist);

// Scratch-buffer instrumentation for the blocked Gram evaluation. Peak bytes
// concurrently held by block workspaces; the footprint depends only on
// block_size and dim, never on patch counts.
std::size_t mmd_scratch_peak_bytes();
void mmd_reset_scratch_peak();

// Worst negative pre-clamp residue seen since the last reset (absolute value).
double mmd_worst_clamp();
void mmd_reset_worst_clamp();

}  // namespace mmdk
