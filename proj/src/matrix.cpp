#include "mmdk/matrix.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "mmdk/csv.hpp"
#include "mmdk/errors.hpp"

namespace mmdk {

namespace {

constexpr char kMagic[4] = {'M', 'M', 'D', 'K'};
constexpr std::uint8_t kVersion = 0x01;
constexpr double kSymEps = 1e-9;

void check_square(const std::vector<std::string>& ids, const std::vector<double>& values,
                  const char* what) {
  if (ids.empty()) throw ValidationError(std::string(what) + ": no ids");
  if (values.size() != ids.size() * ids.size())
    throw ValidationError(std::string(what) + ": value count does not match id count");
}

void check_symmetric_finite(const detail::SquareMatrix& m, const char* what) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = m.at(i, j);
      if (!std::isfinite(v))
        throw ValidationError(std::string(what) + ": non-finite entry at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      if (v != m.at(j, i))
        throw ValidationError(std::string(what) + ": asymmetric at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
    }
  }
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void DistanceMatrix::validate() const {
  check_square(ids, values, "distance matrix");
  check_symmetric_finite(*this, "distance matrix");
  for (std::size_t i = 0; i < size(); ++i) {
    if (at(i, i) != 0.0)
      throw ValidationError("distance matrix: nonzero diagonal at " + std::to_string(i));
    for (std::size_t j = 0; j < size(); ++j) {
      if (at(i, j) < 0.0 || at(i, j) > 2.0 + kSymEps)
        throw ValidationError("distance matrix: entry out of [0, 2] at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
}

void KernelMatrix::validate() const {
  check_square(ids, values, "kernel matrix");
  check_symmetric_finite(*this, "kernel matrix");
  for (std::size_t i = 0; i < size(); ++i) {
    // Jitter remediation may leave the diagonal slightly above 1.
    if (std::abs(at(i, i) - 1.0) > 1e-6)
      throw ValidationError("kernel matrix: diagonal not 1 at " + std::to_string(i));
    for (std::size_t j = 0; j < size(); ++j) {
      if (at(i, j) < 0.0 || at(i, j) > 1.0 + 1e-6)
        throw ValidationError("kernel matrix: entry out of [0, 1] at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
}

DistanceMatrix LoadedMatrix::as_distance() const {
  if (kind != MatrixKind::distance)
    throw ValidationError("matrix file holds a kernel, expected a distance matrix");
  DistanceMatrix d;
  d.ids = ids;
  d.values = values;
  d.validate();
  return d;
}

KernelMatrix LoadedMatrix::as_kernel() const {
  if (kind != MatrixKind::kernel)
    throw ValidationError("matrix file holds a distance matrix, expected a kernel");
  KernelMatrix k;
  k.ids = ids;
  k.values = values;
  k.gamma = std::numeric_limits<double>::quiet_NaN();  // metadata lives in the sidecar
  k.validate();
  return k;
}

void write_matrix_binary(const std::filesystem::path& path, MatrixKind kind,
                         const std::vector<std::string>& ids,
                         const std::vector<double>& values) {
  static_assert(std::endian::native == std::endian::little,
                "MMDK writer assumes a little-endian host");
  check_square(ids, values, "matrix");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  write_raw(out, kVersion);
  write_raw(out, static_cast<std::uint8_t>(kind));
  write_raw(out, static_cast<std::uint32_t>(ids.size()));
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  for (const auto& id : ids) {
    write_raw(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

LoadedMatrix read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad magic in " + path.string());
  std::uint8_t version = 0, kind_byte = 0;
  read_raw(in, version);
  read_raw(in, kind_byte);
  if (version != kVersion)
    throw FormatError("unsupported matrix version in " + path.string());
  if (kind_byte > 1) throw FormatError("unknown matrix kind in " + path.string());
  std::uint32_t n = 0;
  read_raw(in, n);
  if (!in || n == 0) throw FormatError("bad matrix size in " + path.string());

  LoadedMatrix m;
  m.kind = static_cast<MatrixKind>(kind_byte);
  m.values.resize(static_cast<std::size_t>(n) * n);
  in.read(reinterpret_cast<char*>(m.values.data()),
          static_cast<std::streamsize>(m.values.size() * sizeof(double)));
  if (!in) throw FormatError("truncated matrix payload in " + path.string());
  m.ids.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t len = 0;
    read_raw(in, len);
    if (!in) throw FormatError("truncated id table in " + path.string());
    std::string id(len, '\0');
    in.read(id.data(), len);
    if (!in) throw FormatError("truncated id table in " + path.string());
    m.ids.push_back(std::move(id));
  }
  return m;
}

void write_matrix_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& ids,
                      const std::vector<double>& values) {
  check_square(ids, values, "matrix");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "id";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    out << ids[i];
    for (std::size_t j = 0; j < n; ++j) out << ',' << format_g17(values[i * n + j]);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace mmdk
