#include "mmdk/mmd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>

#include <Eigen/Dense>

#include "mmdk/errors.hpp"
#include "mmdk/parallel.hpp"

namespace mmdk {

namespace {

using RowMajorF =
    Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

std::atomic<std::size_t> g_scratch_current{0};
std::atomic<std::size_t> g_scratch_peak{0};
std::atomic<double> g_worst_clamp{0.0};

void atomic_max(std::atomic<double>& target, double v) {
  double cur = target.load(std::memory_order_relaxed);
  while (v > cur && !target.compare_exchange_weak(cur, v)) {
  }
}

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Per-worker buffers for one streamed Gram block. Sized by block_size and dim
// only, so peak memory never scales with the full patch-pair count.
class BlockWorkspace {
 public:
  BlockWorkspace(std::size_t block, std::size_t dim)
      : a_(static_cast<Eigen::Index>(block), static_cast<Eigen::Index>(dim)),
        b_(static_cast<Eigen::Index>(block), static_cast<Eigen::Index>(dim)),
        dots_(static_cast<Eigen::Index>(block), static_cast<Eigen::Index>(block)),
        bytes_((2 * block * dim + block * block) * sizeof(double)) {
    const std::size_t cur = g_scratch_current.fetch_add(bytes_) + bytes_;
    std::size_t peak = g_scratch_peak.load(std::memory_order_relaxed);
    while (cur > peak && !g_scratch_peak.compare_exchange_weak(peak, cur)) {
    }
  }

  ~BlockWorkspace() { g_scratch_current.fetch_sub(bytes_); }

  Eigen::MatrixXd a_, b_, dots_;

 private:
  std::size_t bytes_;
};

struct SetView {
  const float* data;
  std::size_t n;
  std::size_t dim;
  const double* sqnorms;  // |x_i|^2 per patch, double precision
};

std::vector<double> squared_norms(const FeatureSet& set) {
  const std::size_t n = set.patch_count();
  std::vector<double> out(n);
  RowMajorF m(set.data.data(), static_cast<Eigen::Index>(n),
              static_cast<Eigen::Index>(set.dim));
  for (std::size_t i = 0; i < n; ++i)
    out[i] = m.row(static_cast<Eigen::Index>(i)).cast<double>().squaredNorm();
  return out;
}

// Mean Gaussian kernel value over all ordered patch pairs of (A, B).
// Squared distances come from |a|^2 + |b|^2 - 2 a.b with the cross products
// computed blockwise in double-precision GEMM; the full patch-pair Gram is
// never materialized. Block traversal order is fixed, and per-block sums are
// folded with compensated summation, so the result is independent of
// scheduling.
double mean_cross_kernel(const SetView& a, const SetView& b, double sigma,
                         std::size_t block) {
  const double inv_denom = 1.0 / (4.0 * sigma * sigma);
  const std::size_t bs = std::max<std::size_t>(1, block);
  BlockWorkspace ws(std::min(bs, std::max(a.n, b.n)), a.dim);

  RowMajorF fa(a.data, static_cast<Eigen::Index>(a.n), static_cast<Eigen::Index>(a.dim));
  RowMajorF fb(b.data, static_cast<Eigen::Index>(b.n), static_cast<Eigen::Index>(b.dim));

  KahanSum total;
  for (std::size_t i0 = 0; i0 < a.n; i0 += bs) {
    const std::size_t ib = std::min(bs, a.n - i0);
    auto ablk = ws.a_.topRows(static_cast<Eigen::Index>(ib));
    ablk = fa.middleRows(static_cast<Eigen::Index>(i0), static_cast<Eigen::Index>(ib))
               .cast<double>();
    for (std::size_t j0 = 0; j0 < b.n; j0 += bs) {
      const std::size_t jb = std::min(bs, b.n - j0);
      auto bblk = ws.b_.topRows(static_cast<Eigen::Index>(jb));
      bblk = fb.middleRows(static_cast<Eigen::Index>(j0), static_cast<Eigen::Index>(jb))
                 .cast<double>();
      auto dots = ws.dots_.topLeftCorner(static_cast<Eigen::Index>(ib),
                                         static_cast<Eigen::Index>(jb));
      dots.noalias() = ablk * bblk.transpose();

      double block_sum = 0.0;
      for (std::size_t i = 0; i < ib; ++i) {
        const double na = a.sqnorms[i0 + i];
        double row_sum = 0.0;
        for (std::size_t j = 0; j < jb; ++j) {
          const double sq = std::max(
              0.0, na + b.sqnorms[j0 + j] -
                       2.0 * dots(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
          row_sum += std::exp(-sq * inv_denom);
        }
        block_sum += row_sum;
      }
      total.add(block_sum);
    }
  }
  return total.sum / (static_cast<double>(a.n) * static_cast<double>(b.n));
}

SetView make_view(const FeatureSet& s, const std::vector<double>& sqnorms) {
  return SetView{s.data.data(), s.patch_count(), s.dim, sqnorms.data()};
}

void check_pair(const FeatureSet& a, const FeatureSet& b) {
  if (a.dim != b.dim)
    throw ValidationError("dimension mismatch between '" + a.id + "' (dim " +
                          std::to_string(a.dim) + ") and '" + b.id + "' (dim " +
                          std::to_string(b.dim) + ")");
}

double clamp_mmd(double raw) {
  if (raw >= 0.0) return raw;
  atomic_max(g_worst_clamp, -raw);
  if (-raw > 1e-9) {
    std::fprintf(stderr, "warning: clamped mmd^2 residue %.3e to 0 (accumulation trouble?)\n",
                 -raw);
  }
  return 0.0;
}

}  // namespace

void PatchKernelConfig::validate() const {
  if (!std::isfinite(sigma) || sigma <= 0)
    throw ValidationError("sigma must be a positive finite real");
  if (block_size == 0) throw ValidationError("block size must be positive");
}

double patch_kernel(std::span<const double> x, std::span<const double> y,
                    const PatchKernelConfig& cfg) {
  cfg.validate();
  if (x.size() != y.size())
    throw ValidationError("patch kernel: dimension mismatch (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sq += d * d;
  }
  return std::exp(-sq / (4.0 * cfg.sigma * cfg.sigma));
}

double mmd_sq(const FeatureSet& a, const FeatureSet& b, const PatchKernelConfig& cfg) {
  cfg.validate();
  check_pair(a, b);

  // Canonical argument order makes mmd_sq(A, B) == mmd_sq(B, A) bit-exact.
  const FeatureSet* first = &a;
  const FeatureSet* second = &b;
  const bool swap = (a.id != b.id)          ? (b.id < a.id)
                    : (a.patch_count() != b.patch_count()) ? (b.patch_count() < a.patch_count())
                    : std::lexicographical_compare(b.data.begin(), b.data.end(),
                                                   a.data.begin(), a.data.end());
  if (swap) std::swap(first, second);

  const auto na = squared_norms(*first);
  const auto nb = squared_norms(*second);
  const auto va = make_view(*first, na);
  const auto vb = make_view(*second, nb);
  const double self_a = mean_cross_kernel(va, va, cfg.sigma, cfg.block_size);
  const double self_b = mean_cross_kernel(vb, vb, cfg.sigma, cfg.block_size);
  const double cross = mean_cross_kernel(va, vb, cfg.sigma, cfg.block_size);
  return clamp_mmd(self_a + self_b - 2.0 * cross);
}

DistanceMatrix distance_matrix(std::span<const FeatureSet> sets,
                               const PatchKernelConfig& cfg, unsigned threads) {
  cfg.validate();
  const std::size_t n = sets.size();
  if (n < 2) throw ValidationError("distance matrix needs at least 2 feature sets");
  for (std::size_t i = 1; i < n; ++i) check_pair(sets[0], sets[i]);

  // Phase 1: per-set squared norms and cached self terms.
  std::vector<std::vector<double>> sqnorms(n);
  std::vector<double> self_terms(n);
  parallel_for(n, threads, [&](std::size_t i) {
    sqnorms[i] = squared_norms(sets[i]);
    const auto v = make_view(sets[i], sqnorms[i]);
    self_terms[i] = mean_cross_kernel(v, v, cfg.sigma, cfg.block_size);
  });

  DistanceMatrix dist;
  dist.ids.reserve(n);
  for (const auto& s : sets) dist.ids.push_back(s.id);
  dist.values.assign(n * n, 0.0);

  // Phase 2: one task per unordered pair; each task owns two mirrored cells.
  const std::size_t n_pairs = n * (n - 1) / 2;
  parallel_for(n_pairs, threads, [&](std::size_t p) {
    // Unrank p to (i, j), i < j, row-major over the strict upper triangle.
    std::size_t i = 0;
    std::size_t row_len = n - 1;
    std::size_t q = p;
    while (q >= row_len) {
      q -= row_len;
      ++i;
      --row_len;
    }
    const std::size_t j = i + 1 + q;
    try {
      const auto vi = make_view(sets[i], sqnorms[i]);
      const auto vj = make_view(sets[j], sqnorms[j]);
      const double cross = mean_cross_kernel(vi, vj, cfg.sigma, cfg.block_size);
      const double v = clamp_mmd(self_terms[i] + self_terms[j] - 2.0 * cross);
      dist.at(i, j) = v;
      dist.at(j, i) = v;
    } catch (const Error& e) {
      throw NumericError("pair (" + std::to_string(i) + "," + std::to_string(j) +
                         "): " + e.what());
    }
  });
  return dist;
}

KernelMatrix kernel_from_distance(const DistanceMatrix& dist, double gamma,
                                  PsdReport* report) {
  dist.validate();
  if (!std::isfinite(gamma) || gamma < 0)
    throw ValidationError("gamma must be a nonnegative finite real");

  const std::size_t n = dist.size();
  KernelMatrix kernel;
  kernel.ids = dist.ids;
  kernel.gamma = gamma;
  kernel.values.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::exp(-gamma * dist.at(i, j));
      kernel.at(i, j) = v;
      kernel.at(j, i) = v;
    }
  }

  Eigen::Map<const Eigen::MatrixXd> km(kernel.values.data(), static_cast<Eigen::Index>(n),
                                       static_cast<Eigen::Index>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(km, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();

  PsdReport local;
  local.min_eigenvalue = min_eig;
  if (min_eig < -1e-6 * static_cast<double>(n)) {
    // trace is n by construction, so the jitter is 1e-8.
    local.jitter = 1e-8;
    local.jitter_applied = true;
    for (std::size_t i = 0; i < n; ++i) kernel.at(i, i) += local.jitter;
    std::fprintf(stderr,
                 "warning: kernel min eigenvalue %.3e below tolerance; applied diagonal "
                 "jitter %.1e\n",
                 min_eig, local.jitter);
  }
  if (report) *report = local;
  return kernel;
}

double median_inverse_gamma(const DistanceMatrix& dist) {
  dist.validate();
  const std::size_t n = dist.size();
  if (n < 2) throw ValidationError("median gamma needs at least 2 sets");
  std::vector<double> upper;
  upper.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) upper.push_back(dist.at(i, j));
  std::sort(upper.begin(), upper.end());
  const std::size_t m = upper.size();
  const double median =
      (m % 2 == 1) ? upper[m / 2] : 0.5 * (upper[m / 2 - 1] + upper[m / 2]);
  if (median <= 0.0)
    throw NumericError("degenerate dataset: median pairwise mmd^2 is zero");
  return 1.0 / median;
}

std::size_t mmd_scratch_peak_bytes() { return g_scratch_peak.load(); }
void mmd_reset_scratch_peak() { g_scratch_peak.store(g_scratch_current.load()); }

double mmd_worst_clamp() { return g_worst_clamp.load(); }
void mmd_reset_worst_clamp() { g_worst_clamp.store(0.0); }

}  // namespace mmdk
