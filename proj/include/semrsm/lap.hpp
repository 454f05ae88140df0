#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace semrsm::lap {

/// Exact dense linear assignment (Jonker-Volgenant column reduction and
/// reduction transfer, then shortest augmenting paths).
///
/// `cost` is an n x n row-major matrix. Returns, for every row, the column
/// assigned to it such that the summed cost is minimal. Ties resolve the
/// same way on every run.
std::vector<std::size_t> solve_min(std::span<const double> cost, std::size_t n);

/// Same, maximizing the summed weight.
std::vector<std::size_t> solve_max(std::span<const double> weight, std::size_t n);

}  // namespace semrsm::lap
