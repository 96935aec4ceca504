#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmdk/featureset.hpp"

namespace mmdk {

struct ManifestEntry {
  std::string id;
  std::string path;                  // as written in the manifest
  std::optional<int> label;          // {0,1}
  std::optional<double> time;        // nonnegative years
  std::optional<int> event;          // {0,1}; event=1 requires time
};

// Manifest rows plus loaded feature sets, index-aligned with the rows.
struct Dataset {
  std::vector<ManifestEntry> entries;
  std::vector<FeatureSet> sets;

  std::size_t size() const { return entries.size(); }
  std::uint32_t dim() const { return sets.empty() ? 0 : sets.front().dim; }
};

// Parses the manifest CSV (`id,path,label,time,event`, empty cells absent)
// and validates row invariants. Does not touch the feature files.
std::vector<ManifestEntry> read_manifest_rows(const std::filesystem::path& path);

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& path);

// Loads the manifest and every referenced feature file (relative paths are
// resolved against the manifest's directory). File loads run in parallel;
// row order is preserved. Enforces unique ids and a consistent dimension.
Dataset load_manifest(const std::filesystem::path& path, unsigned threads = 0);

}  // namespace mmdk
