#include "mmdk/synthetic.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mmdk/errors.hpp"
#include "mmdk/rng.hpp"

namespace mmdk {

namespace {

std::vector<double> parse_broadcast(const nlohmann::json& j, std::uint32_t dim,
                                    const std::string& what) {
  std::vector<double> out;
  if (j.is_number()) {
    out.assign(dim, j.get<double>());
  } else if (j.is_array()) {
    out = j.get<std::vector<double>>();
    if (out.size() != dim)
      throw ValidationError(what + " has " + std::to_string(out.size()) +
                            " entries, expected dim=" + std::to_string(dim));
  } else {
    throw ValidationError(what + " must be a number or an array");
  }
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  if (dim == 0) throw ValidationError("synth spec: dim must be positive");
  if (patches_min == 0 || patches_max < patches_min)
    throw ValidationError("synth spec: patches_per_set range is invalid");
  if (!(censor_horizon > 0))
    throw ValidationError("synth spec: censor_horizon must be positive");
  if (groups.empty()) throw ValidationError("synth spec: at least one group required");
  for (const auto& g : groups) {
    if (g.n_sets == 0) throw ValidationError("synth spec: group '" + g.name + "' is empty");
    if (g.mean.size() != dim || g.scale.size() != dim)
      throw ValidationError("synth spec: group '" + g.name + "' mean/scale length mismatch");
    for (const double s : g.scale) {
      if (!std::isfinite(s) || s < 0)
        throw ValidationError("synth spec: group '" + g.name + "' has a negative scale");
    }
    for (const double m : g.mean) {
      if (!std::isfinite(m))
        throw ValidationError("synth spec: group '" + g.name + "' has a non-finite mean");
    }
    if (g.label && *g.label != 0 && *g.label != 1)
      throw ValidationError("synth spec: group '" + g.name + "' label must be 0 or 1");
    if (g.event_rate && !(*g.event_rate > 0))
      throw ValidationError("synth spec: group '" + g.name + "' event_rate must be positive");
  }
}

SynthSpec parse_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open synth spec " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("synth spec " + path.string() + ": " + e.what());
  }

  SynthSpec spec;
  try {
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.dim = j.at("dim").get<std::uint32_t>();
    const auto& range = j.at("patches_per_set");
    spec.patches_min = range.at(0).get<std::size_t>();
    spec.patches_max = range.at(1).get<std::size_t>();
    if (j.contains("censor_horizon")) spec.censor_horizon = j["censor_horizon"].get<double>();
    for (const auto& gj : j.at("groups")) {
      GroupSpec g;
      g.name = gj.at("name").get<std::string>();
      g.n_sets = gj.at("n_sets").get<std::size_t>();
      g.mean = parse_broadcast(gj.at("mean"), spec.dim, "group '" + g.name + "' mean");
      g.scale = parse_broadcast(gj.at("scale"), spec.dim, "group '" + g.name + "' scale");
      if (gj.contains("label")) g.label = gj["label"].get<int>();
      if (gj.contains("event_rate")) g.event_rate = gj["event_rate"].get<double>();
      spec.groups.push_back(std::move(g));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("synth spec " + path.string() + ": " + e.what());
  }
  spec.validate();
  return spec;
}

Dataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset ds;
  for (const auto& g : spec.groups) {
    for (std::size_t s = 0; s < g.n_sets; ++s) {
      const std::size_t n =
          static_cast<std::size_t>(rng.uniform_in(spec.patches_min, spec.patches_max));
      FeatureSet set;
      set.id = g.name + "_" + std::to_string(s);
      set.dim = spec.dim;
      set.data.resize(n * spec.dim);
      for (std::size_t p = 0; p < n; ++p) {
        for (std::uint32_t k = 0; k < spec.dim; ++k) {
          set.data[p * spec.dim + k] =
              static_cast<float>(g.mean[k] + g.scale[k] * rng.normal());
        }
      }

      ManifestEntry entry;
      entry.id = set.id;
      entry.path = "features/" + set.id + ".mmdf";
      entry.label = g.label;
      if (g.event_rate) {
        const double t = rng.exponential(*g.event_rate);
        if (t > spec.censor_horizon) {
          entry.time = spec.censor_horizon;
          entry.event = 0;
        } else {
          entry.time = t;
          entry.event = 1;
        }
      }
      ds.entries.push_back(std::move(entry));
      ds.sets.push_back(std::move(set));
    }
  }
  return ds;
}

}  // namespace mmdk
