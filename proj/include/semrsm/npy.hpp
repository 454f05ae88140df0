#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semrsm::npy {

enum class Dtype { f4, f8 };

/// Decoded NPY payload. Values are always held as doubles; `dtype` records
/// the on-disk element type so f4 data can be written back bit-exactly.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> values;
  Dtype dtype = Dtype::f8;
};

/// Only little-endian, C-order '<f4' / '<f8' payloads are accepted.
Array decode(std::string_view bytes);
Array read(const std::filesystem::path& path);

/// Throws InvalidArgument when the product of `shape` differs from values.size().
std::string encode(std::span<const std::size_t> shape, std::span<const double> values,
                   Dtype dtype = Dtype::f8);
void write(const std::filesystem::path& path, std::span<const std::size_t> shape,
           std::span<const double> values, Dtype dtype = Dtype::f8);

}  // namespace semrsm::npy
