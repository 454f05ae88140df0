#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "semrsm/assignment.hpp"
#include "semrsm/parallel.hpp"
#include "semrsm/tensor_io.hpp"
#include "semrsm/types.hpp"

namespace semrsm {

/// Permutation chosen for one (row, col) sample pair.
struct PairPermutation {
  std::size_t row = 0;
  std::size_t col = 0;
  std::vector<std::size_t> permutation;
  double total_affinity = 0.0;
};

struct RsmOptions {
  /// Pair-level workers; null runs on the calling thread.
  WorkerPool* pool = nullptr;
  /// cross_similarity only: one RBF sigma over all queries and database
  /// entries instead of one per block.
  bool global_sigma = false;
  /// Called with (finished pairs, total pairs); calls are serialized.
  std::function<void(std::size_t, std::size_t)> progress;
  /// When set, receives the permutation of every matched pair in
  /// deterministic (row, col) order.
  std::vector<PairPermutation>* permutations = nullptr;
};

/// K[i][j] = kernel(flatten(z_i), flatten(z_j)); locations are compared
/// position by position.
SimilarityMatrix spatio_semantic_rsm(const RepresentationBatch& z, const KernelSpec& kernel,
                                     const RsmOptions& options = {});

/// Each off-diagonal pair is first aligned by matching concept vectors on
/// their linear affinity, then compared with `kernel`. The diagonal is
/// evaluated without matching. Throws InvalidArgument for matcher `none`.
SimilarityMatrix semantic_rsm(const RepresentationBatch& z, const KernelSpec& kernel,
                              const MatcherSpec& matcher, const RsmOptions& options = {});

/// spatio_semantic_rsm for matcher `none`, semantic_rsm otherwise.
SimilarityMatrix compute_rsm(const RepresentationBatch& z, const KernelSpec& kernel,
                             const MatcherSpec& matcher, const RsmOptions& options = {});

/// Rectangular queries x database matrix filled in block x block tiles.
/// With a median-heuristic RBF kernel each tile gets its own sigma computed
/// over the tile's queries and database entries, unless global_sigma is set.
SimilarityMatrix cross_similarity(const RepresentationBatch& queries,
                                  const RepresentationBatch& database, const KernelSpec& kernel,
                                  const MatcherSpec& matcher, std::size_t block,
                                  const RsmOptions& options = {});

/// Similarity of one pair of C x S slices after alignment with `matcher`.
/// `sigma` is used by median-heuristic RBF kernels. When `chosen` is given
/// it receives the matcher's result.
double pair_similarity(std::span<const double> zi, std::span<const double> zj,
                       std::size_t channels, std::size_t spatial, const KernelSpec& kernel,
                       const MatcherSpec& matcher, double sigma = 1.0,
                       AssignmentResult* chosen = nullptr);

/// Median-heuristic sigma over the flattened samples of `z`.
double batch_median_sigma(const RepresentationBatch& z);

}  // namespace semrsm
