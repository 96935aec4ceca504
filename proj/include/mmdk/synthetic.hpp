#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmdk/dataset.hpp"

namespace mmdk {

struct GroupSpec {
  std::string name;
  std::size_t n_sets = 0;
  std::vector<double> mean;          // length dim
  std::vector<double> scale;         // length dim, per-feature std dev, >= 0
  std::optional<int> label;          // binary class label for the group
  std::optional<double> event_rate;  // exponential survival rate, > 0
};

struct SynthSpec {
  std::uint32_t dim = 0;
  std::size_t patches_min = 0;
  std::size_t patches_max = 0;
  std::uint64_t seed = 0;
  double censor_horizon = 10.0;
  std::vector<GroupSpec> groups;

  void validate() const;
};

// JSON schema: {"seed": u64, "dim": n, "patches_per_set": [lo, hi],
//   "censor_horizon": h, "groups": [{"name": s, "n_sets": n,
//   "mean": x | [x...], "scale": x | [x...], "label": 0|1,
//   "event_rate": r}, ...]}
// Scalar mean/scale broadcast across all dim features.
SynthSpec parse_synth_spec(const std::filesystem::path& path);

// Deterministic generator: a single mt19937_64 stream seeded with spec.seed,
// consumed in group order, set order, then patch-major value order. Patch
// vectors are mean + scale * N(0,1); survival times are exponential draws
// truncated at censor_horizon (truncated draws become censored). Ids are
// "<group>_<index>"; entry paths are "features/<id>.mmdf".
Dataset generate_synthetic(const SynthSpec& spec);

}  // namespace mmdk
