#include "semrsm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "semrsm/assignment.hpp"
#include "semrsm/error.hpp"

namespace semrsm {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> gaussian_slice(std::mt19937_64& rng, std::size_t count) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(count);
  for (auto& v : out) v = normal(rng);
  return out;
}

// First `spatial` locations of sample n as a C x spatial slice.
std::vector<double> truncated_slice(const RepresentationBatch& z, std::size_t n,
                                    std::size_t spatial) {
  std::vector<double> out(z.n_channels() * spatial);
  for (std::size_t c = 0; c < z.n_channels(); ++c) {
    for (std::size_t s = 0; s < spatial; ++s) out[c * spatial + s] = z.at(n, c, s);
  }
  return out;
}

std::vector<AffinityMatrix> make_instances(const BenchConfig& config, std::size_t spatial) {
  std::seed_seq seq{static_cast<std::uint64_t>(config.seed), static_cast<std::uint64_t>(spatial)};
  std::mt19937_64 rng(seq);
  std::vector<AffinityMatrix> out;
  out.reserve(config.pairs);
  if (config.source == nullptr) {
    const std::size_t c = config.channels;
    for (std::size_t p = 0; p < config.pairs; ++p) {
      const auto zi = gaussian_slice(rng, c * spatial);
      const auto zj = gaussian_slice(rng, c * spatial);
      out.push_back(affinity(zi, zj, c, spatial));
    }
    return out;
  }
  const auto& z = *config.source;
  if (z.n_spatial() < spatial) {
    throw InvalidArgument("representations have S=" + std::to_string(z.n_spatial()) +
                          ", too small for requested S=" + std::to_string(spatial));
  }
  if (z.n_samples() < 2) throw InvalidArgument("benchmark source needs at least two samples");
  std::uniform_int_distribution<std::size_t> pick(0, z.n_samples() - 1);
  for (std::size_t p = 0; p < config.pairs; ++p) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    const auto zi = truncated_slice(z, i, spatial);
    const auto zj = truncated_slice(z, j, spatial);
    out.push_back(affinity(zi, zj, z.n_channels(), spatial));
  }
  return out;
}

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

json summary_json(const RatioSummary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"std", s.std}, {"p5", s.p5},
          {"p25", s.p25},     {"p50", s.p50},   {"p75", s.p75}, {"p95", s.p95}};
}

json matcher_params(const MatcherSpec& m) {
  json params = json::object();
  if (m.kind == MatcherKind::topk_greedy) params["k"] = m.k;
  if (m.kind == MatcherKind::batch_optimal) params["b"] = m.b;
  return params;
}

}  // namespace

BenchReport bench_matchers(const BenchConfig& config) {
  if (config.pairs < 1) throw InvalidArgument("benchmark needs pairs >= 1");
  for (const auto s : config.sizes) {
    if (s < 1) throw InvalidArgument("benchmark sizes must be >= 1");
    for (const auto& m : config.matchers) m.validate(s);
  }
  BenchReport report;
  report.source = config.source == nullptr ? "gaussian" : "representations";
  report.channels = config.source == nullptr ? config.channels : config.source->n_channels();
  report.seed = config.seed;

  for (const auto spatial : config.sizes) {
    const auto instances = make_instances(config, spatial);
    std::vector<double> optimal_totals;
    optimal_totals.reserve(instances.size());
    for (const auto& a : instances) optimal_totals.push_back(solve_optimal(a).total_affinity);

    for (const auto& matcher : config.matchers) {
      for (std::size_t w = 0; w < config.warmup; ++w) {
        (void)solve(instances[w % instances.size()], matcher);
      }
      BenchCell cell;
      cell.spatial = spatial;
      cell.matcher = matcher;
      cell.seed = config.seed;
      cell.n_pairs = instances.size();
      std::vector<double> times;
      double ratio_sum = 0.0;
      std::size_t ratio_count = 0;
      for (std::size_t p = 0; p < instances.size(); ++p) {
        const auto start = Clock::now();
        const auto result = solve(instances[p], matcher);
        const auto elapsed = std::chrono::duration<double, std::nano>(Clock::now() - start);
        times.push_back(elapsed.count());
        ++cell.n_solves;
        if (optimal_totals[p] == 0.0) {
          ++cell.n_degenerate;
          continue;
        }
        // The exact matcher is its own reference.
        ratio_sum += matcher.kind == MatcherKind::optimal
                         ? 1.0
                         : result.total_affinity / optimal_totals[p];
        ++ratio_count;
      }
      cell.mean_time_ns = std::accumulate(times.begin(), times.end(), 0.0) /
                          static_cast<double>(times.size());
      std::sort(times.begin(), times.end());
      cell.median_time_ns = percentile(times, 0.5);
      if (ratio_count > 0) cell.mean_ratio = ratio_sum / static_cast<double>(ratio_count);
      report.cells.push_back(cell);
    }
  }
  return report;
}

json to_json(const BenchReport& report, bool include_timing) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json cell = {
        {"S", c.spatial},
        {"matcher", to_string(c.matcher.kind)},
        {"label", c.matcher.kind == MatcherKind::none ? "No Match" : to_string(c.matcher)},
        {"params", matcher_params(c.matcher)},
        {"mean_ratio", c.mean_ratio ? json(*c.mean_ratio) : json(nullptr)},
        {"n_pairs", c.n_pairs},
        {"n_solves", c.n_solves},
        {"n_degenerate", c.n_degenerate},
        {"seed", c.seed},
    };
    if (include_timing) {
      cell["mean_time_ns"] = c.mean_time_ns;
      cell["median_time_ns"] = c.median_time_ns;
    }
    cells.push_back(std::move(cell));
  }
  return {{"source", report.source},
          {"channels", report.channels},
          {"seed", report.seed},
          {"cells", std::move(cells)}};
}

std::string to_csv(const BenchReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "S,matcher,k,b,mean_time_ns,median_time_ns,mean_ratio,n_pairs,n_degenerate,seed\n";
  for (const auto& c : report.cells) {
    out << c.spatial << ',' << to_string(c.matcher.kind) << ',' << c.matcher.k << ','
        << c.matcher.b << ',' << c.mean_time_ns << ',' << c.median_time_ns << ',';
    if (c.mean_ratio) out << *c.mean_ratio;
    out << ',' << c.n_pairs << ',' << c.n_degenerate << ',' << c.seed << '\n';
  }
  return out.str();
}

RatioSummary summarize(std::vector<double> values) {
  RatioSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (const double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / n);
  std::sort(values.begin(), values.end());
  s.p5 = percentile(values, 0.05);
  s.p25 = percentile(values, 0.25);
  s.p50 = percentile(values, 0.50);
  s.p75 = percentile(values, 0.75);
  s.p95 = percentile(values, 0.95);
  return s;
}

RatioDistribution relative_similarity_distribution(const RepresentationBatch& z,
                                                   const MatcherSpec& matcher, std::size_t pairs,
                                                   std::uint64_t seed) {
  const std::size_t n = z.n_samples();
  const std::size_t available = n * (n - 1) / 2;
  if (pairs > available) {
    throw InvalidArgument("requested " + std::to_string(pairs) + " pairs but only " +
                          std::to_string(available) + " exist");
  }
  matcher.validate(z.n_spatial());
  std::vector<std::pair<std::size_t, std::size_t>> all;
  all.reserve(available);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) all.emplace_back(i, j);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);

  const std::size_t c = z.n_channels();
  const std::size_t s = z.n_spatial();
  RatioDistribution dist;
  dist.matcher = matcher;
  dist.seed = seed;
  std::vector<double> identity_ratios;
  std::vector<double> approx_ratios;
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto [i, j] = all[p];
    const auto a = affinity(z.sample(i), z.sample(j), c, s);
    const auto opt = solve_optimal(a);
    ++dist.n_pairs;
    if (opt.total_affinity == 0.0) {
      ++dist.n_degenerate;
      continue;
    }
    identity_ratios.push_back(*quality_ratio(identity_assignment(a), opt));
    approx_ratios.push_back(matcher.kind == MatcherKind::optimal
                                ? 1.0
                                : *quality_ratio(solve(a, matcher), opt));
  }
  dist.identity = summarize(std::move(identity_ratios));
  dist.approx = summarize(std::move(approx_ratios));
  return dist;
}

json to_json(const RatioDistribution& dist) {
  return {{"matcher", to_string(dist.matcher)},
          {"n_pairs", dist.n_pairs},
          {"n_degenerate", dist.n_degenerate},
          {"seed", dist.seed},
          {"identity_ratio", summary_json(dist.identity)},
          {"matcher_ratio", summary_json(dist.approx)}};
}

}  // namespace semrsm
