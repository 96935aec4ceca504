#include "mmdk/dataset.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include "mmdk/csv.hpp"
#include "mmdk/errors.hpp"
#include "mmdk/parallel.hpp"

namespace mmdk {

namespace {

constexpr std::string_view kHeader = "id,path,label,time,event";

void validate_entry(const ManifestEntry& e, std::size_t row) {
  const std::string where = "manifest row " + std::to_string(row) + " (id '" + e.id + "')";
  if (e.id.empty()) throw ValidationError(where + ": empty id");
  if (e.path.empty()) throw ValidationError(where + ": empty path");
  if (e.label && *e.label != 0 && *e.label != 1)
    throw ValidationError(where + ": label must be 0 or 1");
  if (e.event && *e.event != 0 && *e.event != 1)
    throw ValidationError(where + ": event must be 0 or 1");
  if (e.time && (!std::isfinite(*e.time) || *e.time < 0))
    throw ValidationError(where + ": time must be a nonnegative real");
  if (e.event && *e.event == 1 && !e.time)
    throw ValidationError(where + ": event=1 requires a time");
}

}  // namespace

std::vector<ManifestEntry> read_manifest_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty manifest " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw FormatError("manifest " + path.string() + ": expected header '" +
                      std::string(kHeader) + "'");

  std::vector<ManifestEntry> entries;
  std::unordered_set<std::string> seen;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5)
      throw FormatError("manifest " + path.string() + ": row " + std::to_string(row) +
                        " has " + std::to_string(cells.size()) + " cells, expected 5");
    ManifestEntry e;
    e.id = std::string(cells[0]);
    e.path = std::string(cells[1]);
    if (!cells[2].empty()) e.label = parse_number<int>(cells[2], "label");
    if (!cells[3].empty()) e.time = parse_number<double>(cells[3], "time");
    if (!cells[4].empty()) e.event = parse_number<int>(cells[4], "event");
    validate_entry(e, row);
    if (!seen.insert(e.id).second)
      throw ValidationError("manifest " + path.string() + ": duplicate id '" + e.id + "'");
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw ValidationError("manifest " + path.string() + " has no rows");
  return entries;
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kHeader << '\n';
  for (const auto& e : entries) {
    out << e.id << ',' << e.path << ',';
    if (e.label) out << *e.label;
    out << ',';
    if (e.time) out << format_g17(*e.time);
    out << ',';
    if (e.event) out << *e.event;
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Dataset load_manifest(const std::filesystem::path& path, unsigned threads) {
  Dataset ds;
  ds.entries = read_manifest_rows(path);
  ds.sets.resize(ds.entries.size());

  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  parallel_for(ds.entries.size(), threads, [&](std::size_t i) {
    std::filesystem::path fp(ds.entries[i].path);
    if (fp.is_relative()) fp = base / fp;
    ds.sets[i] = read_featureset(fp);
    ds.sets[i].id = ds.entries[i].id;
  });

  const std::uint32_t d = ds.sets.front().dim;
  for (std::size_t i = 1; i < ds.sets.size(); ++i) {
    if (ds.sets[i].dim != d)
      throw ValidationError("dimension mismatch: '" + ds.entries[i].id + "' has dim " +
                            std::to_string(ds.sets[i].dim) + ", expected " + std::to_string(d));
  }
  return ds;
}

}  // namespace mmdk
