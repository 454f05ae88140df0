#include "semrsm/rsm.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <string>

#include "semrsm/assignment.hpp"
#include "semrsm/error.hpp"
#include "semrsm/kernels.hpp"

namespace semrsm {

namespace {

class ProgressCounter {
 public:
  ProgressCounter(const RsmOptions& options, std::size_t total)
      : callback_(options.progress), total_(total) {}

  void tick() {
    if (!callback_) return;
    const auto done = ++done_;
    std::lock_guard lock(mutex_);
    callback_(done, total_);
  }

 private:
  const std::function<void(std::size_t, std::size_t)>& callback_;
  std::size_t total_;
  std::atomic<std::size_t> done_{0};
  std::mutex mutex_;
};

std::vector<std::span<const double>> flattened(const RepresentationBatch& z) {
  std::vector<std::span<const double>> out;
  out.reserve(z.n_samples());
  for (std::size_t i = 0; i < z.n_samples(); ++i) out.push_back(z.sample(i));
  return out;
}

// Upper triangle (i < j) of an n x n matrix, row-major.
std::vector<std::pair<std::size_t, std::size_t>> upper_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

SimilarityMatrix square_result(const RepresentationBatch& z, const KernelSpec& kernel,
                               const MatcherSpec& matcher) {
  SimilarityMatrix out;
  out.values = Matrix(z.n_samples(), z.n_samples());
  out.row_ids = z.sample_ids();
  out.col_ids = z.sample_ids();
  out.kind = MatrixKind::square_symmetric;
  out.kernel = kernel;
  out.matcher = matcher;
  return out;
}

double sigma_for(const KernelSpec& kernel, const RepresentationBatch& z) {
  if (!kernel.uses_median_sigma()) return kernel.fixed_sigma.value_or(1.0);
  if (z.n_samples() < 2) return 1.0;
  return batch_median_sigma(z);
}

}  // namespace

double batch_median_sigma(const RepresentationBatch& z) {
  const auto vectors = flattened(z);
  return median_sigma(vectors);
}

double pair_similarity(std::span<const double> zi, std::span<const double> zj,
                       std::size_t channels, std::size_t spatial, const KernelSpec& kernel,
                       const MatcherSpec& matcher, double sigma, AssignmentResult* chosen) {
  if (matcher.kind == MatcherKind::none) {
    if (chosen != nullptr) *chosen = identity_assignment(affinity(zi, zj, channels, spatial));
    return evaluate_kernel(kernel, zi, zj, sigma);
  }
  const auto a = affinity(zi, zj, channels, spatial);
  auto result = solve(a, matcher);
  std::vector<double> aligned(zj.size());
  permute_spatial(zj, channels, spatial, result.permutation, aligned);
  const double value = evaluate_kernel(kernel, zi, aligned, sigma);
  if (chosen != nullptr) *chosen = std::move(result);
  return value;
}

SimilarityMatrix spatio_semantic_rsm(const RepresentationBatch& z, const KernelSpec& kernel,
                                     const RsmOptions& options) {
  kernel.validate();
  auto out = square_result(z, kernel, MatcherSpec::none());
  const double sigma = sigma_for(kernel, z);
  if (kernel.uses_median_sigma()) out.sigma = sigma;

  const std::size_t n = z.n_samples();
  // Row i covers (i, i..n-1); each row writes only its own upper half and mirror.
  ProgressCounter progress(options, n * (n + 1) / 2);
  parallel_for(options.pool, n, [&](std::size_t i) {
    const auto zi = z.sample(i);
    for (std::size_t j = i; j < n; ++j) {
      const double v = evaluate_kernel(kernel, zi, z.sample(j), sigma);
      out.values(i, j) = v;
      out.values(j, i) = v;
      progress.tick();
    }
  });
  return out;
}

SimilarityMatrix semantic_rsm(const RepresentationBatch& z, const KernelSpec& kernel,
                              const MatcherSpec& matcher, const RsmOptions& options) {
  kernel.validate();
  if (matcher.kind == MatcherKind::none) {
    throw InvalidArgument("semantic RSM needs a matcher other than 'none'");
  }
  const std::size_t c = z.n_channels();
  const std::size_t s = z.n_spatial();
  matcher.validate(s);

  auto out = square_result(z, kernel, matcher);
  const double sigma = sigma_for(kernel, z);
  if (kernel.uses_median_sigma()) out.sigma = sigma;

  const std::size_t n = z.n_samples();
  std::vector<std::vector<double>> norms(n);
  parallel_for(options.pool, n,
               [&](std::size_t i) { norms[i] = concept_norms(z.sample(i), c, s); });

  for (std::size_t i = 0; i < n; ++i) {
    out.values(i, i) = evaluate_kernel(kernel, z.sample(i), z.sample(i), sigma);
  }

  const auto pairs = upper_pairs(n);
  if (options.permutations != nullptr) {
    options.permutations->assign(pairs.size(), PairPermutation{});
  }
  ProgressCounter progress(options, pairs.size());
  parallel_for(options.pool, pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const auto zi = z.sample(i);
    const auto zj = z.sample(j);
    const auto a = affinity(zi, zj, c, s, norms[i], norms[j]);
    auto result = solve(a, matcher);
    std::vector<double> aligned(zj.size());
    permute_spatial(zj, c, s, result.permutation, aligned);
    const double v = evaluate_kernel(kernel, zi, aligned, sigma);
    out.values(i, j) = v;
    out.values(j, i) = v;
    if (options.permutations != nullptr) {
      (*options.permutations)[p] =
          PairPermutation{i, j, std::move(result.permutation), result.total_affinity};
    }
    progress.tick();
  });
  return out;
}

SimilarityMatrix compute_rsm(const RepresentationBatch& z, const KernelSpec& kernel,
                             const MatcherSpec& matcher, const RsmOptions& options) {
  if (matcher.kind == MatcherKind::none) return spatio_semantic_rsm(z, kernel, options);
  return semantic_rsm(z, kernel, matcher, options);
}

SimilarityMatrix cross_similarity(const RepresentationBatch& queries,
                                  const RepresentationBatch& database, const KernelSpec& kernel,
                                  const MatcherSpec& matcher, std::size_t block,
                                  const RsmOptions& options) {
  kernel.validate();
  if (queries.n_channels() != database.n_channels() ||
      queries.n_spatial() != database.n_spatial()) {
    throw ShapeError("queries are " + std::to_string(queries.n_channels()) + "x" +
                     std::to_string(queries.n_spatial()) + " but the database is " +
                     std::to_string(database.n_channels()) + "x" +
                     std::to_string(database.n_spatial()));
  }
  if (block < 1) throw InvalidArgument("block size must be >= 1");
  const std::size_t c = queries.n_channels();
  const std::size_t s = queries.n_spatial();
  matcher.validate(s);

  const std::size_t rows = queries.n_samples();
  const std::size_t cols = database.n_samples();
  SimilarityMatrix out;
  out.values = Matrix(rows, cols);
  out.row_ids = queries.sample_ids();
  out.col_ids = database.sample_ids();
  out.kind = MatrixKind::rectangular;
  out.kernel = kernel;
  out.matcher = matcher;

  const bool per_block_sigma = kernel.uses_median_sigma() && !options.global_sigma;
  double global_sigma = kernel.fixed_sigma.value_or(1.0);
  if (kernel.uses_median_sigma() && options.global_sigma) {
    auto vectors = flattened(queries);
    const auto db = flattened(database);
    vectors.insert(vectors.end(), db.begin(), db.end());
    global_sigma = median_sigma(vectors);
    out.sigma = global_sigma;
  }

  std::vector<std::vector<double>> query_norms;
  std::vector<std::vector<double>> db_norms;
  if (matcher.kind != MatcherKind::none) {
    query_norms.resize(rows);
    db_norms.resize(cols);
    parallel_for(options.pool, rows,
                 [&](std::size_t i) { query_norms[i] = concept_norms(queries.sample(i), c, s); });
    parallel_for(options.pool, cols,
                 [&](std::size_t j) { db_norms[j] = concept_norms(database.sample(j), c, s); });
  }

  const std::size_t row_blocks = (rows + block - 1) / block;
  const std::size_t col_blocks = (cols + block - 1) / block;
  ProgressCounter progress(options, row_blocks * col_blocks);
  parallel_for(options.pool, row_blocks * col_blocks, [&](std::size_t t) {
    const std::size_t r0 = (t / col_blocks) * block;
    const std::size_t c0 = (t % col_blocks) * block;
    const std::size_t r1 = std::min(rows, r0 + block);
    const std::size_t c1 = std::min(cols, c0 + block);

    double sigma = global_sigma;
    if (per_block_sigma) {
      std::vector<std::span<const double>> vectors;
      for (std::size_t i = r0; i < r1; ++i) vectors.push_back(queries.sample(i));
      for (std::size_t j = c0; j < c1; ++j) vectors.push_back(database.sample(j));
      sigma = vectors.size() >= 2 ? median_sigma(vectors) : 1.0;
    }

    std::vector<double> aligned(c * s);
    for (std::size_t i = r0; i < r1; ++i) {
      const auto zi = queries.sample(i);
      for (std::size_t j = c0; j < c1; ++j) {
        const auto zj = database.sample(j);
        if (matcher.kind == MatcherKind::none) {
          out.values(i, j) = evaluate_kernel(kernel, zi, zj, sigma);
          continue;
        }
        const auto a = affinity(zi, zj, c, s, query_norms[i], db_norms[j]);
        const auto result = solve(a, matcher);
        permute_spatial(zj, c, s, result.permutation, aligned);
        out.values(i, j) = evaluate_kernel(kernel, zi, aligned, sigma);
      }
    }
    progress.tick();
  });
  return out;
}

}  // namespace semrsm
