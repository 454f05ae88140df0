#include "semrsm/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semrsm/error.hpp"
#include "semrsm/lap.hpp"

namespace semrsm {

namespace {

using Clock = std::chrono::steady_clock;

void require_square(const AffinityMatrix& a) {
  if (!a.values.is_square()) throw ShapeError("affinity matrix must be square");
  if (a.row_norms.size() != a.size() || a.col_norms.size() != a.size()) {
    throw ShapeError("affinity norms do not match the matrix size");
  }
}

AssignmentResult finish(const AffinityMatrix& a, std::vector<std::size_t> perm, MatcherSpec method,
                        Clock::time_point start) {
  AssignmentResult out;
  out.solve_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  out.total_affinity = assignment_total(a.values, perm);
  out.permutation = std::move(perm);
  out.method = method;
  return out;
}

// Exactly matches rows[t] against cols[*] for the given index subsets (equal size).
void match_block(const Matrix& values, std::span<const std::size_t> rows,
                 std::span<const std::size_t> cols, std::vector<std::size_t>& perm,
                 std::vector<double>& scratch) {
  const std::size_t m = rows.size();
  scratch.resize(m * m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto src = values.row(rows[r]);
    for (std::size_t c = 0; c < m; ++c) scratch[r * m + c] = src[cols[c]];
  }
  const auto local = lap::solve_max(scratch, m);
  for (std::size_t r = 0; r < m; ++r) perm[rows[r]] = cols[local[r]];
}

// Each row of `order` in turn takes the highest-affinity column still free.
void greedy_fill(const Matrix& values, std::span<const std::size_t> order,
                 std::vector<char>& taken, std::vector<std::size_t>& perm) {
  const std::size_t s = values.cols();
  for (const auto r : order) {
    const auto row = values.row(r);
    std::size_t best = s;
    for (std::size_t c = 0; c < s; ++c) {
      if (taken[c]) continue;
      if (best == s || row[c] > row[best]) best = c;
    }
    taken[best] = 1;
    perm[r] = best;
  }
}

}  // namespace

std::vector<double> concept_norms(std::span<const double> slice, std::size_t channels,
                                  std::size_t spatial) {
  if (slice.size() != channels * spatial) throw ShapeError("slice is not C x S");
  std::vector<double> sq(spatial, 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    const double* row = slice.data() + c * spatial;
    for (std::size_t s = 0; s < spatial; ++s) sq[s] += row[s] * row[s];
  }
  for (auto& v : sq) v = std::sqrt(v);
  return sq;
}

AffinityMatrix affinity(std::span<const double> zi, std::span<const double> zj,
                        std::size_t channels, std::size_t spatial) {
  return affinity(zi, zj, channels, spatial, concept_norms(zi, channels, spatial),
                  concept_norms(zj, channels, spatial));
}

AffinityMatrix affinity(std::span<const double> zi, std::span<const double> zj,
                        std::size_t channels, std::size_t spatial,
                        std::vector<double> row_norms, std::vector<double> col_norms) {
  if (zi.size() != channels * spatial || zj.size() != channels * spatial) {
    throw ShapeError("affinity needs two C x S slices of equal shape");
  }
  AffinityMatrix a{Matrix(spatial, spatial), std::move(row_norms), std::move(col_norms)};
  // Accumulate channel by channel so the inner loop runs over contiguous memory.
  for (std::size_t c = 0; c < channels; ++c) {
    const double* ri = zi.data() + c * spatial;
    const double* rj = zj.data() + c * spatial;
    for (std::size_t r = 0; r < spatial; ++r) {
      const double x = ri[r];
      if (x == 0.0) continue;
      auto out = a.values.row(r);
      for (std::size_t s = 0; s < spatial; ++s) out[s] += x * rj[s];
    }
  }
  return a;
}

double assignment_total(const Matrix& values, std::span<const std::size_t> permutation) {
  double total = 0.0;
  for (std::size_t r = 0; r < permutation.size(); ++r) total += values(r, permutation[r]);
  return total;
}

std::vector<std::size_t> descending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return values[l] > values[r]; });
  return order;
}

AssignmentResult solve_optimal(const AffinityMatrix& a) {
  require_square(a);
  const auto start = Clock::now();
  auto perm = lap::solve_max(a.values.data(), a.size());
  return finish(a, std::move(perm), MatcherSpec::optimal(), start);
}

AssignmentResult solve_greedy(const AffinityMatrix& a) {
  require_square(a);
  const auto start = Clock::now();
  const std::size_t s = a.size();
  std::vector<std::size_t> perm(s);
  std::vector<char> taken(s, 0);
  greedy_fill(a.values, descending_order(a.row_norms), taken, perm);
  return finish(a, std::move(perm), MatcherSpec::greedy(), start);
}

AssignmentResult solve_topk_greedy(const AffinityMatrix& a, std::size_t k) {
  require_square(a);
  const std::size_t s = a.size();
  if (k < 1 || k > s) {
    throw InvalidArgument("topk-greedy k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(s) + "]");
  }
  const auto start = Clock::now();
  const auto row_order = descending_order(a.row_norms);
  const auto col_order = descending_order(a.col_norms);
  std::vector<std::size_t> perm(s);
  std::vector<double> scratch;
  match_block(a.values, std::span(row_order).first(k), std::span(col_order).first(k), perm,
              scratch);
  std::vector<char> taken(s, 0);
  for (std::size_t t = 0; t < k; ++t) taken[col_order[t]] = 1;
  greedy_fill(a.values, std::span(row_order).subspan(k), taken, perm);
  return finish(a, std::move(perm), MatcherSpec::topk_greedy(k), start);
}

AssignmentResult solve_batch_optimal(const AffinityMatrix& a, std::size_t b) {
  require_square(a);
  if (b < 1) throw InvalidArgument("batch-optimal requires b >= 1");
  const auto start = Clock::now();
  const std::size_t s = a.size();
  const std::size_t block = std::min(b, s);
  const auto row_order = descending_order(a.row_norms);
  const auto col_order = descending_order(a.col_norms);
  std::vector<std::size_t> perm(s);
  std::vector<double> scratch;
  for (std::size_t first = 0; first < s; first += block) {
    const std::size_t len = std::min(block, s - first);
    if (len == 1) {
      perm[row_order[first]] = col_order[first];
      continue;
    }
    match_block(a.values, std::span(row_order).subspan(first, len),
                std::span(col_order).subspan(first, len), perm, scratch);
  }
  return finish(a, std::move(perm), MatcherSpec::batch_optimal(b), start);
}

AssignmentResult identity_assignment(std::size_t s) {
  AssignmentResult out;
  out.permutation.resize(s);
  std::iota(out.permutation.begin(), out.permutation.end(), std::size_t{0});
  out.method = MatcherSpec::none();
  return out;
}

AssignmentResult identity_assignment(const AffinityMatrix& a) {
  require_square(a);
  const auto start = Clock::now();
  auto out = identity_assignment(a.size());
  return finish(a, std::move(out.permutation), MatcherSpec::none(), start);
}

AssignmentResult solve(const AffinityMatrix& a, const MatcherSpec& spec) {
  switch (spec.kind) {
    case MatcherKind::none: return identity_assignment(a);
    case MatcherKind::optimal: return solve_optimal(a);
    case MatcherKind::greedy: return solve_greedy(a);
    case MatcherKind::topk_greedy: return solve_topk_greedy(a, spec.k);
    case MatcherKind::batch_optimal: return solve_batch_optimal(a, spec.b);
  }
  throw InvalidArgument("unknown matcher");
}

std::optional<double> quality_ratio(const AssignmentResult& approx,
                                    const AssignmentResult& optimal) {
  if (optimal.total_affinity == 0.0) return std::nullopt;
  return approx.total_affinity / optimal.total_affinity;
}

void permute_spatial(std::span<const double> zj, std::size_t channels, std::size_t spatial,
                     std::span<const std::size_t> permutation, std::span<double> out) {
  if (zj.size() != channels * spatial || out.size() != zj.size() ||
      permutation.size() != spatial) {
    throw ShapeError("permute_spatial: shape mismatch");
  }
  for (std::size_t c = 0; c < channels; ++c) {
    const double* src = zj.data() + c * spatial;
    double* dst = out.data() + c * spatial;
    for (std::size_t a = 0; a < spatial; ++a) dst[a] = src[permutation[a]];
  }
}

}  // namespace semrsm
