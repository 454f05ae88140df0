#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semrsm/tensor_io.hpp"
#include "semrsm/types.hpp"

namespace semrsm {

struct BenchConfig {
  std::vector<std::size_t> sizes;
  std::size_t channels = 64;
  std::size_t pairs = 10;
  /// `none` rows report the unmatched (identity) baseline.
  std::vector<MatcherSpec> matchers;
  /// When set, pairs are drawn from these representations (first S spatial
  /// locations); otherwise i.i.d. standard Gaussian activations.
  const RepresentationBatch* source = nullptr;
  std::uint64_t seed = 0;
  std::size_t warmup = 3;
};

struct BenchCell {
  std::size_t spatial = 0;
  MatcherSpec matcher;
  double mean_time_ns = 0.0;
  double median_time_ns = 0.0;
  /// Mean of per-pair total / optimal total over pairs with a non-zero optimum.
  std::optional<double> mean_ratio;
  std::size_t n_pairs = 0;
  std::size_t n_solves = 0;
  std::size_t n_degenerate = 0;
  std::uint64_t seed = 0;
};

struct BenchReport {
  std::string source;
  std::size_t channels = 0;
  std::uint64_t seed = 0;
  std::vector<BenchCell> cells;
};

/// Times every matcher on the same `pairs` affinity matrices per size,
/// one solve at a time, after `warmup` untimed solves per cell.
BenchReport bench_matchers(const BenchConfig& config);

nlohmann::json to_json(const BenchReport& report, bool include_timing = true);
std::string to_csv(const BenchReport& report);

struct RatioSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  double p5 = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
};

/// Summary statistics (population std, linearly interpolated percentiles).
RatioSummary summarize(std::vector<double> values);

struct RatioDistribution {
  MatcherSpec matcher;
  std::size_t n_pairs = 0;
  std::size_t n_degenerate = 0;
  std::uint64_t seed = 0;
  RatioSummary identity;
  RatioSummary approx;
};

/// Distribution of k_identity / k_optimal and k_matcher / k_optimal over
/// `pairs` sample pairs drawn without replacement (seeded shuffle of all
/// i < j). Pairs with a zero optimal total are skipped and counted.
RatioDistribution relative_similarity_distribution(const RepresentationBatch& z,
                                                   const MatcherSpec& matcher, std::size_t pairs,
                                                   std::uint64_t seed = 0);

nlohmann::json to_json(const RatioDistribution& dist);

}  // namespace semrsm
