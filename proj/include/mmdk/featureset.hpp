#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mmdk {

// One bag of patch feature vectors for a single slide. Values are stored in
// single precision (the on-disk payload type); all kernel arithmetic is done
// in double downstream. Immutable after construction and safe to share.
struct FeatureSet {
  std::string id;
  std::uint32_t dim = 0;
  std::vector<float> data;  // patch-major, patch_count() x dim

  std::size_t patch_count() const { return dim == 0 ? 0 : data.size() / dim; }

  std::span<const float> patch(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }

  bool operator==(const FeatureSet& other) const = default;

  // Throws ValidationError: needs >=1 patch, dim >= 1, finite values.
  void validate() const;
};

// Reads either format, sniffed from the leading bytes: the "MMDF" binary
// container, or headerless CSV with one patch per line. The id is taken from
// the file stem.
FeatureSet read_featureset(const std::filesystem::path& path);

// Binary container only. Layout: "MMDF", version 0x01, reserved 0x00,
// u32 LE patch count, u32 LE dim, then count*dim IEEE 754 f32 LE patch-major.
void write_featureset(const FeatureSet& set, const std::filesystem::path& path);

}  // namespace mmdk
