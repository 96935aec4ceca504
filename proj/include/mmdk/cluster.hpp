#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mmdk/matrix.hpp"

namespace mmdk {

enum class Linkage { average, complete, single };

Linkage linkage_from_name(const std::string& name);
const char* linkage_name(Linkage linkage);

struct Merge {
  std::size_t left = 0;   // node index, left < right
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;   // member count of the merged node
};

// Leaves carry node indices 0..N-1; the m-th merge creates node N+m.
struct Dendrogram {
  std::vector<std::string> ids;  // leaf ids, index-aligned with the matrix
  std::vector<Merge> merges;     // N-1 records in merge order

  std::size_t leaf_count() const { return ids.size(); }
  void validate() const;
};

// Agglomerative clustering over the squared-MMD matrix. Cluster-pair
// distances are defined directly on the original matrix entries: average
// linkage is the mean over all cross leaf pairs accumulated in canonical
// (sorted-leaf) order, so results are exactly reproducible by an independent
// implementation of the same formula. Ties between candidate pairs break on
// the lexicographically smallest (min node, max node).
Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage = Linkage::average);

// Flat assignment from undoing the last k-1 merges. Cluster ids are assigned
// by ascending smallest contained leaf index.
std::vector<std::size_t> cut(const Dendrogram& dendrogram, std::size_t k);

nlohmann::json dendrogram_to_json(const Dendrogram& dendrogram);
Dendrogram dendrogram_from_json(const nlohmann::json& j);

}  // namespace mmdk
