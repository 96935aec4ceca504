#include "mmdk/featureset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "mmdk/csv.hpp"
#include "mmdk/errors.hpp"

namespace mmdk {

namespace {

constexpr char kMagic[4] = {'M', 'M', 'D', 'F'};
constexpr std::uint8_t kVersion = 0x01;

void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

FeatureSet read_binary(const std::filesystem::path& path, std::ifstream& in) {
  unsigned char header[14];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) throw FormatError("truncated header in " + path.string());
  if (std::memcmp(header, kMagic, 4) != 0)
    throw FormatError("bad magic in " + path.string());
  if (header[4] != kVersion)
    throw FormatError("unsupported version " + std::to_string(header[4]) + " in " + path.string());
  const std::uint32_t n = get_u32_le(header + 6);
  const std::uint32_t d = get_u32_le(header + 10);
  if (n == 0) throw ValidationError("zero patch count in " + path.string());
  if (d == 0) throw ValidationError("zero dimension in " + path.string());

  FeatureSet set;
  set.id = path.stem().string();
  set.dim = d;
  set.data.resize(static_cast<std::size_t>(n) * d);
  in.read(reinterpret_cast<char*>(set.data.data()),
          static_cast<std::streamsize>(set.data.size() * sizeof(float)));
  if (!in) throw FormatError("truncated payload in " + path.string());
  if constexpr (std::endian::native == std::endian::big) {
    for (float& v : set.data) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = __builtin_bswap32(bits);
      std::memcpy(&v, &bits, 4);
    }
  }
  set.validate();
  return set;
}

FeatureSet read_csv(const std::filesystem::path& path, std::ifstream& in) {
  FeatureSet set;
  set.id = path.stem().string();
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto cells = split_csv_line(line);
    if (set.dim == 0) {
      set.dim = static_cast<std::uint32_t>(cells.size());
    } else if (cells.size() != set.dim) {
      throw ValidationError(path.string() + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " values, expected " +
                            std::to_string(set.dim));
    }
    for (const auto cell : cells) {
      set.data.push_back(parse_number<float>(cell, "feature value at row " + std::to_string(row)));
    }
  }
  set.validate();
  return set;
}

}  // namespace

void FeatureSet::validate() const {
  if (dim == 0) throw ValidationError("feature set '" + id + "': dimension is zero");
  if (data.empty() || data.size() % dim != 0)
    throw ValidationError("feature set '" + id + "': payload is not a whole number of patches");
  for (const float v : data) {
    if (!std::isfinite(v))
      throw ValidationError("feature set '" + id + "': non-finite feature value");
  }
}

FeatureSet read_featureset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char probe[4] = {};
  in.read(probe, 4);
  if (in.gcount() == 4 && std::memcmp(probe, kMagic, 4) == 0) {
    in.seekg(0);
    return read_binary(path, in);
  }
  in.clear();
  in.seekg(0);
  return read_csv(path, in);
}

void write_featureset(const FeatureSet& set, const std::filesystem::path& path) {
  set.validate();
  const std::size_t n = set.patch_count();
  if (n > std::numeric_limits<std::uint32_t>::max())
    throw ValidationError("feature set '" + set.id + "': too many patches for the container");

  std::string header;
  header.append(kMagic, 4);
  header.push_back(static_cast<char>(kVersion));
  header.push_back('\0');
  put_u32_le(header, static_cast<std::uint32_t>(n));
  put_u32_le(header, set.dim);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(set.data.data()),
              static_cast<std::streamsize>(set.data.size() * sizeof(float)));
  } else {
    for (const float v : set.data) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = __builtin_bswap32(bits);
      char le[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                    static_cast<char>((bits >> 16) & 0xFF), static_cast<char>((bits >> 24) & 0xFF)};
      out.write(le, 4);
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace mmdk
