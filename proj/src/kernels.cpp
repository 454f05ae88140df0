#include "semrsm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semrsm/error.hpp"
#include "semrsm/log.hpp"

namespace semrsm {

namespace {

void check_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ShapeError("kernel arguments have lengths " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

double linear_kernel(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  return dot(x, y);
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma) {
  check_lengths(x, y);
  if (!(sigma > 0.0)) throw InvalidArgument("rbf sigma must be positive");
  return std::exp(-squared_distance(x, y) / (2.0 * sigma * sigma));
}

double cosine_kernel(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  const double nx = std::sqrt(dot(x, x));
  const double ny = std::sqrt(dot(y, y));
  if (nx == 0.0 && ny == 0.0) return 1.0;
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return std::clamp(dot(x, y) / (nx * ny), -1.0, 1.0);
}

double median_sigma(std::span<const std::span<const double>> vectors) {
  const std::size_t n = vectors.size();
  if (n < 2) throw InvalidArgument("median sigma needs at least two vectors");
  std::vector<double> distances;
  distances.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      check_lengths(vectors[i], vectors[j]);
      distances.push_back(std::sqrt(squared_distance(vectors[i], vectors[j])));
    }
  }
  const std::size_t m = distances.size();
  const auto mid = distances.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  double median = *mid;
  if (m % 2 == 0) {
    const double lower = *std::max_element(distances.begin(), mid);
    median = 0.5 * (lower + median);
  }
  if (median == 0.0) {
    log::warn("median pairwise distance is zero; falling back to rbf sigma = 1");
    return 1.0;
  }
  return std::sqrt(median);
}

double evaluate_kernel(const KernelSpec& spec, std::span<const double> x,
                       std::span<const double> y, double sigma) {
  switch (spec.kind) {
    case KernelKind::linear: return linear_kernel(x, y);
    case KernelKind::rbf: return rbf_kernel(x, y, spec.fixed_sigma.value_or(sigma));
    case KernelKind::cosine: return cosine_kernel(x, y);
  }
  return 0.0;
}

}  // namespace semrsm
