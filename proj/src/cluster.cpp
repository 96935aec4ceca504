#include "mmdk/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mmdk/errors.hpp"

namespace mmdk {

namespace {

struct Cluster {
  std::size_t node = 0;
  std::vector<std::size_t> leaves;  // ascending
};

// Cluster-pair distance from the original matrix. The cluster with the
// smaller minimum leaf iterates outer; leaves ascend; the accumulator is a
// plain double. This fixes the floating-point result completely.
double cluster_distance(const DistanceMatrix& dist, const Cluster& x, const Cluster& y,
                        Linkage linkage) {
  const Cluster* outer = &x;
  const Cluster* inner = &y;
  if (inner->leaves.front() < outer->leaves.front()) std::swap(outer, inner);
  switch (linkage) {
    case Linkage::average: {
      double sum = 0.0;
      for (const std::size_t a : outer->leaves)
        for (const std::size_t b : inner->leaves) sum += dist.at(a, b);
      return sum / (static_cast<double>(outer->leaves.size()) *
                    static_cast<double>(inner->leaves.size()));
    }
    case Linkage::complete: {
      double best = -std::numeric_limits<double>::infinity();
      for (const std::size_t a : outer->leaves)
        for (const std::size_t b : inner->leaves) best = std::max(best, dist.at(a, b));
      return best;
    }
    case Linkage::single: {
      double best = std::numeric_limits<double>::infinity();
      for (const std::size_t a : outer->leaves)
        for (const std::size_t b : inner->leaves) best = std::min(best, dist.at(a, b));
      return best;
    }
  }
  return 0.0;
}

}  // namespace

Linkage linkage_from_name(const std::string& name) {
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  if (name == "single") return Linkage::single;
  throw ValidationError("unknown linkage '" + name + "'");
}

const char* linkage_name(Linkage linkage) {
  switch (linkage) {
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
  }
  return "?";
}

void Dendrogram::validate() const {
  const std::size_t n = leaf_count();
  if (n < 2) throw ValidationError("dendrogram needs at least 2 leaves");
  if (merges.size() != n - 1)
    throw ValidationError("dendrogram must have exactly N-1 merges");
  std::vector<bool> used(2 * n - 1, false);
  for (std::size_t m = 0; m < merges.size(); ++m) {
    const Merge& rec = merges[m];
    if (rec.left >= rec.right || rec.right >= n + m)
      throw ValidationError("merge " + std::to_string(m) + ": bad node indices");
    if (used[rec.left] || used[rec.right])
      throw ValidationError("merge " + std::to_string(m) + ": node merged twice");
    used[rec.left] = used[rec.right] = true;
    if (!(rec.height >= 0) || !std::isfinite(rec.height))
      throw ValidationError("merge " + std::to_string(m) + ": bad height");
  }
  if (merges.back().size != n)
    throw ValidationError("dendrogram root does not contain all leaves");
}

Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage) {
  dist.validate();
  const std::size_t n = dist.size();
  if (n < 2) throw ValidationError("clustering needs at least 2 items");

  std::vector<Cluster> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = Cluster{i, {i}};

  // Pairwise candidate heights; pair (p, q) indexes `active`.
  std::vector<std::vector<double>> height(n);
  for (std::size_t p = 0; p < n; ++p) {
    height[p].resize(p);
    for (std::size_t q = 0; q < p; ++q)
      height[p][q] = cluster_distance(dist, active[p], active[q], linkage);
  }
  auto pair_height = [&](std::size_t p, std::size_t q) -> double& {
    return p > q ? height[p][q] : height[q][p];
  };

  Dendrogram out;
  out.ids = dist.ids;
  out.merges.reserve(n - 1);

  for (std::size_t m = 0; m + 1 < n; ++m) {
    std::size_t best_p = 0, best_q = 0;
    double best_h = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{0, 0};
    for (std::size_t p = 0; p < active.size(); ++p) {
      for (std::size_t q = 0; q < p; ++q) {
        const double h = pair_height(p, q);
        const auto key = std::minmax(active[p].node, active[q].node);
        if (h < best_h || (h == best_h && key < best_key)) {
          best_h = h;
          best_key = key;
          best_p = p;
          best_q = q;
        }
      }
    }

    Cluster merged;
    merged.node = n + m;
    const Cluster& cp = active[best_p];
    const Cluster& cq = active[best_q];
    merged.leaves.resize(cp.leaves.size() + cq.leaves.size());
    std::merge(cp.leaves.begin(), cp.leaves.end(), cq.leaves.begin(), cq.leaves.end(),
               merged.leaves.begin());
    out.merges.push_back(Merge{best_key.first, best_key.second, best_h, merged.leaves.size()});

    // Drop the two merged clusters (larger index first), append the new one.
    const auto [lo, hi] = std::minmax(best_p, best_q);
    auto drop = [&](std::size_t idx) {
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(idx));
      height.erase(height.begin() + static_cast<std::ptrdiff_t>(idx));
      for (auto& row : height)
        if (row.size() > idx) row.erase(row.begin() + static_cast<std::ptrdiff_t>(idx));
    };
    drop(hi);
    drop(lo);
    active.push_back(std::move(merged));
    height.emplace_back(active.size() - 1);
    for (std::size_t q = 0; q + 1 < active.size(); ++q)
      height.back()[q] = cluster_distance(dist, active.back(), active[q], linkage);
  }
  return out;
}

std::vector<std::size_t> cut(const Dendrogram& dendrogram, std::size_t k) {
  dendrogram.validate();
  const std::size_t n = dendrogram.leaf_count();
  if (k == 0 || k > n) throw ValidationError("cut: k must be in [1, N]");

  // Apply the first N-k merges over a union-find of node indices.
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m < n - k; ++m) {
    const Merge& rec = dendrogram.merges[m];
    parent[find(rec.left)] = n + m;
    parent[find(rec.right)] = n + m;
  }

  // Roots ordered by their smallest leaf get ids 0..k-1.
  std::vector<std::size_t> order;  // roots in first-seen (= smallest-leaf) order
  std::vector<std::size_t> assignment(n);
  std::vector<std::ptrdiff_t> root_id(2 * n - 1, -1);
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const std::size_t r = find(leaf);
    if (root_id[r] < 0) {
      root_id[r] = static_cast<std::ptrdiff_t>(order.size());
      order.push_back(r);
    }
    assignment[leaf] = static_cast<std::size_t>(root_id[r]);
  }
  return assignment;
}

nlohmann::json dendrogram_to_json(const Dendrogram& dendrogram) {
  nlohmann::json j;
  j["ids"] = dendrogram.ids;
  auto& merges = j["merges"] = nlohmann::json::array();
  for (const Merge& m : dendrogram.merges)
    merges.push_back({m.left, m.right, m.height, m.size});
  return j;
}

Dendrogram dendrogram_from_json(const nlohmann::json& j) {
  Dendrogram d;
  try {
    d.ids = j.at("ids").get<std::vector<std::string>>();
    for (const auto& rec : j.at("merges")) {
      d.merges.push_back(Merge{rec.at(0).get<std::size_t>(), rec.at(1).get<std::size_t>(),
                               rec.at(2).get<double>(), rec.at(3).get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("dendrogram json: ") + e.what());
  }
  d.validate();
  return d;
}

}  // namespace mmdk
