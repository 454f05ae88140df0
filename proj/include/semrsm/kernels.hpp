#pragma once

#include <span>
#include <vector>

#include "semrsm/types.hpp"

namespace semrsm {

/// Inner product. Throws ShapeError on length mismatch.
double linear_kernel(std::span<const double> x, std::span<const double> y);

/// exp(-|x - y|^2 / (2 sigma^2)). Throws InvalidArgument for sigma <= 0.
double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma);

/// <x, y> / (|x| |y|). A zero vector has similarity 0 to any non-zero
/// vector and 1 to another zero vector.
double cosine_kernel(std::span<const double> x, std::span<const double> y);

/// Bandwidth heuristic: square root of the median pairwise Euclidean
/// distance (mean of the two central values for an even pair count).
/// Falls back to 1.0 with a warning when the median distance is zero.
/// Throws InvalidArgument for fewer than two vectors.
double median_sigma(std::span<const std::span<const double>> vectors);

/// Evaluates `spec` on (x, y). `sigma` is only read for RBF kernels.
double evaluate_kernel(const KernelSpec& spec, std::span<const double> x,
                       std::span<const double> y, double sigma = 1.0);

}  // namespace semrsm
