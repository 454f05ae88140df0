#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "semrsm/matrix.hpp"

namespace semrsm {

/// H = I - (1/n) 11^T. Throws InvalidArgument for n = 0.
Matrix centering_matrix(std::size_t n);

/// H K H, computed from row, column and grand means.
Matrix double_center(const Matrix& k);

/// Biased estimator tr(K H L H) / (n - 1)^2.
/// Throws ShapeError on mismatched or non-square input, InvalidArgument for n < 2.
double hsic(const Matrix& k, const Matrix& l);

/// HSIC(K, L) / sqrt(HSIC(K, K) HSIC(L, L)); absent (with a logged
/// diagnostic) when either self-HSIC is not positive.
std::optional<double> cka(const Matrix& k, const Matrix& l);

/// Mean of per-batch CKA over paired mini-batch RSMs. Batches with an
/// undefined CKA are skipped; absent if none is defined.
std::optional<double> batched_cka(std::span<const Matrix> k_batches,
                                  std::span<const Matrix> l_batches);

/// Splits an n x n RSM into its diagonal blocks of `batch` samples (the
/// last one possibly smaller). Blocks of fewer than two samples are dropped.
std::vector<Matrix> diagonal_blocks(const Matrix& k, std::size_t batch);

/// One layer's RSM, possibly split into mini-batches.
using LayerRsms = std::vector<Matrix>;

/// entry (p, q) = batched_cka(a[p], b[q]); undefined entries are NaN.
/// Throws ShapeError unless every RSM in both lists has the same shape.
Matrix cka_layer_matrix(std::span<const LayerRsms> a, std::span<const LayerRsms> b);

/// Single-batch convenience form.
Matrix cka_layer_matrix(std::span<const Matrix> a, std::span<const Matrix> b);

}  // namespace semrsm
