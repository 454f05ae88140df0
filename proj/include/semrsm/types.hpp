#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semrsm/matrix.hpp"

namespace semrsm {

enum class KernelKind { linear, rbf, cosine };

/// Similarity kernel plus, for RBF, the bandwidth policy. An RBF kernel
/// without a fixed sigma uses the median heuristic.
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  std::optional<double> fixed_sigma;

  static KernelSpec linear() { return {KernelKind::linear, std::nullopt}; }
  static KernelSpec cosine() { return {KernelKind::cosine, std::nullopt}; }
  static KernelSpec rbf_median() { return {KernelKind::rbf, std::nullopt}; }
  static KernelSpec rbf_fixed(double sigma) { return {KernelKind::rbf, sigma}; }

  bool uses_median_sigma() const noexcept { return kind == KernelKind::rbf && !fixed_sigma; }

  /// Throws InvalidArgument if a sigma is attached to a non-RBF kernel or is not positive.
  void validate() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

enum class MatcherKind { none, optimal, greedy, topk_greedy, batch_optimal };

/// Spatial matching strategy. `k` is used by topk-greedy, `b` by batch-optimal.
struct MatcherSpec {
  MatcherKind kind = MatcherKind::none;
  std::size_t k = 0;
  std::size_t b = 0;

  static MatcherSpec none() { return {MatcherKind::none, 0, 0}; }
  static MatcherSpec optimal() { return {MatcherKind::optimal, 0, 0}; }
  static MatcherSpec greedy() { return {MatcherKind::greedy, 0, 0}; }
  static MatcherSpec topk_greedy(std::size_t k) { return {MatcherKind::topk_greedy, k, 0}; }
  static MatcherSpec batch_optimal(std::size_t b) { return {MatcherKind::batch_optimal, 0, b}; }

  /// Checks parameter ranges; when `spatial` is given also checks k <= S.
  void validate(std::optional<std::size_t> spatial = std::nullopt) const;

  friend bool operator==(const MatcherSpec&, const MatcherSpec&) = default;
};

enum class MatrixKind { square_symmetric, rectangular };

struct SimilarityMatrix {
  Matrix values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  MatrixKind kind = MatrixKind::square_symmetric;
  KernelSpec kernel;
  MatcherSpec matcher;
  /// RBF bandwidth when a single sigma was used for the whole matrix.
  std::optional<double> sigma;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }

  /// Checks finiteness, exact symmetry for square matrices, id list lengths
  /// and the kernel's value range. Throws ValidationError.
  void validate() const;
};

std::string to_string(KernelKind kind);
std::string to_string(MatcherKind kind);
std::string to_string(MatrixKind kind);
/// "batch-optimal:512", "topk-greedy:8", "optimal", ...
std::string to_string(const MatcherSpec& spec);
/// "linear", "cosine", "rbf" or "rbf:<sigma>".
std::string to_string(const KernelSpec& spec);

KernelKind parse_kernel_kind(std::string_view text);
MatcherKind parse_matcher_kind(std::string_view text);
MatrixKind parse_matrix_kind(std::string_view text);
/// Accepts the same forms `to_string` produces. A bare "batch-optimal" gets
/// b = 512 and a bare "topk-greedy" is rejected.
MatcherSpec parse_matcher(std::string_view text);
KernelSpec parse_kernel(std::string_view text);

/// Default block size for batch-optimal matching.
inline constexpr std::size_t kDefaultBatchSize = 512;

}  // namespace semrsm
