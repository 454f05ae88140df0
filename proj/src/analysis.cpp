#include "semrsm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "semrsm/error.hpp"

namespace semrsm {

namespace {

constexpr double kRenormalizeSlack = 1e-4;

void check_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ShapeError("probability vectors have lengths " + std::to_string(a) + " and " +
                     std::to_string(b));
  }
}

double log_in(double x, LogBase base) {
  return base == LogBase::natural ? std::log(x) : std::log2(x);
}

}  // namespace

ProbabilityVector::ProbabilityVector(std::span<const double> values)
    : probs_(values.begin(), values.end()) {
  if (probs_.empty()) throw ValidationError("probability vector is empty");
  double sum = 0.0;
  for (const double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ValidationError("probabilities must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kRenormalizeSlack) {
    throw ValidationError("probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  if (sum != 1.0) {
    for (auto& p : probs_) p /= sum;
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<ProbabilityVector> probability_rows(const Matrix& rows, bool from_logits) {
  std::vector<ProbabilityVector> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    if (from_logits) {
      const auto p = softmax(rows.row(r));
      out.emplace_back(p);
    } else {
      out.emplace_back(rows.row(r));
    }
  }
  return out;
}

double kl_divergence(const ProbabilityVector& p, const ProbabilityVector& q, LogBase base) {
  check_same_length(p.size(), q.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[i] * log_in(p[i] / q[i], base);
  }
  return std::max(sum, 0.0);
}

double jsd(const ProbabilityVector& p, const ProbabilityVector& q, LogBase base) {
  check_same_length(p.size(), q.size());
  double kl_pm = 0.0;
  double kl_qm = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) kl_pm += p[i] * log_in(p[i] / m, base);
    if (q[i] > 0.0) kl_qm += q[i] * log_in(q[i] / m, base);
  }
  const double upper = base == LogBase::natural ? std::numbers::ln2 : 1.0;
  return std::clamp(0.5 * kl_pm + 0.5 * kl_qm, 0.0, upper);
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("correlation inputs differ in length");
  if (xs.size() < 2) throw InvalidArgument("correlation needs at least two values");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
  std::vector<double> ranks(values.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    // Positions start..end-1 hold ranks start+1..end.
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t t = start; t < end; ++t) ranks[order[t]] = rank;
    start = end;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("correlation inputs differ in length");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

CorrelationMethod parse_correlation_method(std::string_view text) {
  if (text == "pearson") return CorrelationMethod::pearson;
  if (text == "spearman") return CorrelationMethod::spearman;
  throw InvalidArgument("unknown correlation method '" + std::string(text) + "'");
}

std::string to_string(CorrelationMethod method) {
  return method == CorrelationMethod::pearson ? "pearson" : "spearman";
}

Matrix jsd_matrix(std::span<const ProbabilityVector> probs, LogBase base, WorkerPool* pool) {
  const std::size_t n = probs.size();
  Matrix out(n, n);
  parallel_for(pool, n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = jsd(probs[i], probs[j], base);
      out(i, j) = v;
      out(j, i) = v;
    }
  });
  return out;
}

CorrelationResult correlate_similarity_jsd(const Matrix& sim,
                                           std::span<const ProbabilityVector> probs,
                                           CorrelationMethod method, LogBase base,
                                           WorkerPool* pool) {
  const std::size_t n = probs.size();
  if (!sim.is_square() || sim.rows() != n) {
    throw ShapeError("similarity matrix must be N x N with one probability row per sample");
  }
  if (n < 3) throw InvalidArgument("correlation needs at least 3 samples (3 pairs)");
  const Matrix divergences = jsd_matrix(probs, base, pool);
  std::vector<double> sims;
  std::vector<double> divs;
  sims.reserve(n * (n - 1) / 2);
  divs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sims.push_back(sim(i, j));
      divs.push_back(divergences(i, j));
    }
  }
  CorrelationResult out;
  out.pairs = sims.size();
  out.rho = method == CorrelationMethod::pearson ? pearson(sims, divs) : spearman(sims, divs);
  return out;
}

}  // namespace semrsm
