#include "semrsm/lap.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "semrsm/error.hpp"

namespace semrsm::lap {

namespace {

using Index = std::ptrdiff_t;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimization LAP. Starts from Jonker-Volgenant column reduction with
// reduction transfer, then assigns each remaining free row along a shortest
// augmenting path. Row duals u and column duals v are kept explicitly so
// that c(i, j) - u[i] - v[j] >= 0 holds throughout, with equality on
// assigned pairs; the result is therefore optimal.
class DenseSolver {
 public:
  DenseSolver(std::span<const double> cost, Index n)
      : cost_(cost), n_(n), row_col_(n, -1), col_row_(n, -1), u_(n, 0.0), v_(n, kInf) {}

  std::vector<std::size_t> run() {
    const auto free_rows = column_reduction();
    for (Index i : free_rows) augment(i);
    std::vector<std::size_t> out(n_);
    for (Index i = 0; i < n_; ++i) out[i] = static_cast<std::size_t>(row_col_[i]);
    return out;
  }

 private:
  double c(Index i, Index j) const { return cost_[i * n_ + j]; }

  std::vector<Index> column_reduction() {
    std::vector<Index> argmin(n_, 0);
    for (Index i = 0; i < n_; ++i) {
      for (Index j = 0; j < n_; ++j) {
        if (c(i, j) < v_[j]) {
          v_[j] = c(i, j);
          argmin[j] = i;
        }
      }
    }
    std::vector<char> unique(n_, 1);
    for (Index j = n_ - 1; j >= 0; --j) {
      const Index i = argmin[j];
      if (row_col_[i] < 0) {
        row_col_[i] = j;
        col_row_[j] = i;
      } else {
        unique[i] = 0;
      }
    }
    std::vector<Index> free_rows;
    for (Index i = 0; i < n_; ++i) {
      if (row_col_[i] < 0) {
        double min = kInf;
        for (Index j = 0; j < n_; ++j) min = std::min(min, c(i, j) - v_[j]);
        u_[i] = min;
        free_rows.push_back(i);
      } else if (unique[i]) {
        // Reduction transfer: move slack from the row onto its column.
        const Index j = row_col_[i];
        double min = kInf;
        for (Index j2 = 0; j2 < n_; ++j2) {
          if (j2 != j) min = std::min(min, c(i, j2) - v_[j2]);
        }
        v_[j] -= min;
        u_[i] = c(i, j) - v_[j];
      } else {
        u_[i] = c(i, row_col_[i]) - v_[row_col_[i]];
      }
    }
    return free_rows;
  }

  void augment(Index start) {
    std::vector<double> shortest(n_, kInf);
    std::vector<Index> pred(n_, -1);
    std::vector<char> row_seen(n_, 0), col_seen(n_, 0);
    std::vector<Index> remaining(n_);
    for (Index k = 0; k < n_; ++k) remaining[k] = n_ - 1 - k;
    Index n_remaining = n_;

    double min_val = 0.0;
    Index i = start;
    Index sink = -1;
    while (sink < 0) {
      row_seen[i] = 1;
      Index best = -1;
      double lowest = kInf;
      for (Index k = 0; k < n_remaining; ++k) {
        const Index j = remaining[k];
        const double r = min_val + c(i, j) - u_[i] - v_[j];
        if (r < shortest[j]) {
          shortest[j] = r;
          pred[j] = i;
        }
        // Prefer an unassigned column among equals: it ends the search.
        if (shortest[j] < lowest || (shortest[j] == lowest && col_row_[j] < 0)) {
          lowest = shortest[j];
          best = k;
        }
      }
      if (best < 0 || lowest == kInf) throw Error("assignment problem has no finite solution");
      min_val = lowest;
      const Index j = remaining[best];
      col_seen[j] = 1;
      remaining[best] = remaining[--n_remaining];
      if (col_row_[j] < 0) {
        sink = j;
      } else {
        i = col_row_[j];
      }
    }

    u_[start] += min_val;
    for (Index r = 0; r < n_; ++r) {
      if (row_seen[r] && r != start) u_[r] += min_val - shortest[row_col_[r]];
    }
    for (Index j = 0; j < n_; ++j) {
      if (col_seen[j]) v_[j] -= min_val - shortest[j];
    }

    Index j = sink;
    for (;;) {
      const Index r = pred[j];
      col_row_[j] = r;
      std::swap(row_col_[r], j);
      if (r == start) break;
    }
  }

  std::span<const double> cost_;
  Index n_;
  std::vector<Index> row_col_;
  std::vector<Index> col_row_;
  std::vector<double> u_;
  std::vector<double> v_;
};

}  // namespace

std::vector<std::size_t> solve_min(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) {
    throw ShapeError("assignment cost has " + std::to_string(cost.size()) +
                     " entries, expected " + std::to_string(n) + "^2");
  }
  if (n == 0) return {};
  if (n == 1) return {0};
  return DenseSolver(cost, static_cast<Index>(n)).run();
}

std::vector<std::size_t> solve_max(std::span<const double> weight, std::size_t n) {
  std::vector<double> cost(weight.size());
  for (std::size_t k = 0; k < weight.size(); ++k) cost[k] = -weight[k];
  return solve_min(cost, n);
}

}  // namespace semrsm::lap
