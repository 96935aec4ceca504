#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mmdk {

enum class MatrixKind : std::uint8_t { distance = 0, kernel = 1 };

namespace detail {

struct SquareMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;  // N*N row-major

  std::size_t size() const { return ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * ids.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * ids.size() + j]; }
};

}  // namespace detail

// N x N matrix of squared MMD values. Symmetric, zero diagonal, entries in
// [0, 2] for the Gaussian patch kernel.
struct DistanceMatrix : detail::SquareMatrix {
  void validate() const;
};

// Entrywise exp(-gamma * D). Symmetric, unit diagonal (absent jitter),
// entries in [0, 1]. gamma is carried as metadata; it is not part of the
// binary container.
struct KernelMatrix : detail::SquareMatrix {
  double gamma = 0.0;

  void validate() const;
};

struct LoadedMatrix {
  MatrixKind kind = MatrixKind::distance;
  std::vector<std::string> ids;
  std::vector<double> values;

  DistanceMatrix as_distance() const;
  KernelMatrix as_kernel() const;
};

// Binary container: "MMDK", version 0x01, kind byte (0 distance, 1 kernel),
// u32 LE N, N*N IEEE 754 f64 LE row-major, then N ids each as u32 LE length +
// UTF-8 bytes.
void write_matrix_binary(const std::filesystem::path& path, MatrixKind kind,
                         const std::vector<std::string>& ids,
                         const std::vector<double>& values);
LoadedMatrix read_matrix_binary(const std::filesystem::path& path);

// CSV mirror: header `id,<id0>,...`, then one row per id with 17-significant-
// digit values.
void write_matrix_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& ids,
                      const std::vector<double>& values);

}  // namespace mmdk
