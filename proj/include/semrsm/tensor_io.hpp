#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semrsm/npy.hpp"
#include "semrsm/types.hpp"

namespace semrsm {

/// N samples of C x S activations, stored sample-major then channel-major:
/// element (n, c, s) lives at n*C*S + c*S + s. The C x S slice of one
/// sample is contiguous, so it doubles as that sample's flattened vector.
class RepresentationBatch {
 public:
  RepresentationBatch() = default;

  /// Validates shape, finiteness and ids. Empty id lists are filled with
  /// "0".."N-1" (sample ids) or left empty (group ids).
  RepresentationBatch(std::size_t n_samples, std::size_t n_channels, std::size_t n_spatial,
                      std::vector<double> data, std::vector<std::string> sample_ids = {},
                      std::vector<std::string> group_ids = {});

  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t n_spatial() const noexcept { return n_spatial_; }
  std::size_t sample_size() const noexcept { return n_channels_ * n_spatial_; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> sample(std::size_t i) const noexcept {
    return {data_.data() + i * sample_size(), sample_size()};
  }
  double at(std::size_t n, std::size_t c, std::size_t s) const noexcept {
    return data_[n * sample_size() + c * n_spatial_ + s];
  }

  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::vector<std::string>& group_ids() const noexcept { return group_ids_; }
  bool has_groups() const noexcept { return !group_ids_.empty(); }

  /// Samples [first, first + count) as a new batch, ids included.
  RepresentationBatch slice(std::size_t first, std::size_t count) const;

 private:
  std::size_t n_samples_ = 0;
  std::size_t n_channels_ = 0;
  std::size_t n_spatial_ = 0;
  std::vector<double> data_;
  std::vector<std::string> sample_ids_;
  std::vector<std::string> group_ids_;
};

/// Reads an NPY tensor of rank 2 (N x D, S = 1), 3 (N x C x S) or 4
/// (N x C x W x H, S = W*H). A sidecar `<stem>.json` holding
/// {"sample_ids": [...], "group_ids": [...]} is applied when present.
RepresentationBatch load_representations(const std::filesystem::path& path);

/// Builds a batch from a decoded NPY array using the same rank rules.
RepresentationBatch batch_from_array(const npy::Array& array);

struct Centered {
  RepresentationBatch batch;
  /// Per-position mean (C x S) that was subtracted.
  std::vector<double> mean;
};

/// Subtracts the per-position sample mean, or `external_mean` when given
/// (e.g. queries centered with the database mean).
Centered center(const RepresentationBatch& batch,
                std::optional<std::span<const double>> external_mean = std::nullopt);

enum class MatrixFormat { npy, csv, json };

MatrixFormat parse_matrix_format(std::string_view text);
/// Picks the format from the file extension, defaulting to NPY.
MatrixFormat format_from_extension(const std::filesystem::path& path);

void save_matrix(const SimilarityMatrix& matrix, const std::filesystem::path& path,
                 MatrixFormat format, npy::Dtype dtype = npy::Dtype::f8);

/// Loads a matrix written by `save_matrix` in NPY or JSON form. NPY files
/// carry no metadata, so the kind is inferred from the shape.
SimilarityMatrix load_matrix(const std::filesystem::path& path);

}  // namespace semrsm
