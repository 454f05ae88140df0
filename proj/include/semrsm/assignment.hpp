#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "semrsm/matrix.hpp"
#include "semrsm/types.hpp"

namespace semrsm {

/// Inner products between every concept vector (column) of one C x S
/// sample and every concept vector of another, plus their L2 norms.
struct AffinityMatrix {
  Matrix values;
  std::vector<double> row_norms;
  std::vector<double> col_norms;

  std::size_t size() const noexcept { return values.rows(); }
};

struct AssignmentResult {
  /// permutation[a] is the column matched to row a.
  std::vector<std::size_t> permutation;
  double total_affinity = 0.0;
  MatcherSpec method;
  std::chrono::nanoseconds solve_time{0};
};

/// L2 norm of each of the S concept vectors in a C x S slice.
std::vector<double> concept_norms(std::span<const double> slice, std::size_t channels,
                                  std::size_t spatial);

/// values[a][b] = <v_{i,a}, v_{j,b}>. Throws ShapeError if a slice is not C*S long.
AffinityMatrix affinity(std::span<const double> zi, std::span<const double> zj,
                        std::size_t channels, std::size_t spatial);

/// Same, reusing norms computed once per sample.
AffinityMatrix affinity(std::span<const double> zi, std::span<const double> zj,
                        std::size_t channels, std::size_t spatial,
                        std::vector<double> row_norms, std::vector<double> col_norms);

/// Sum of values[a][permutation[a]].
double assignment_total(const Matrix& values, std::span<const std::size_t> permutation);

AssignmentResult solve_optimal(const AffinityMatrix& a);

/// Rows in descending norm order each take their best free column.
AssignmentResult solve_greedy(const AffinityMatrix& a);

/// The k largest-norm rows and k largest-norm columns are matched exactly;
/// the rest greedily. Throws InvalidArgument unless 1 <= k <= S.
AssignmentResult solve_topk_greedy(const AffinityMatrix& a, std::size_t k);

/// Rows and columns sorted by descending norm are cut into consecutive
/// blocks of size b, and the a-th row block is matched exactly against the
/// a-th column block. b > S behaves as b = S.
AssignmentResult solve_batch_optimal(const AffinityMatrix& a, std::size_t b);

/// [0, 1, ..., s-1] with zero total.
AssignmentResult identity_assignment(std::size_t s);
/// Identity permutation with total = trace(a).
AssignmentResult identity_assignment(const AffinityMatrix& a);

/// Dispatches on `spec.kind`; `none` yields the identity.
AssignmentResult solve(const AffinityMatrix& a, const MatcherSpec& spec);

/// approx.total / optimal.total, absent when the optimal total is zero.
std::optional<double> quality_ratio(const AssignmentResult& approx,
                                    const AssignmentResult& optimal);

/// Writes z_j with its spatial axis reordered by `permutation`:
/// out[c*S + a] = zj[c*S + permutation[a]].
void permute_spatial(std::span<const double> zj, std::size_t channels, std::size_t spatial,
                     std::span<const std::size_t> permutation, std::span<double> out);

/// Indices sorted by descending value, lowest index first among equals.
std::vector<std::size_t> descending_order(std::span<const double> values);

}  // namespace semrsm
