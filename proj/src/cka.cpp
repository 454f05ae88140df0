#include "semrsm/cka.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "semrsm/error.hpp"
#include "semrsm/log.hpp"

namespace semrsm {

Matrix centering_matrix(std::size_t n) {
  if (n == 0) throw InvalidArgument("centering matrix needs n >= 1");
  const double inv = 1.0 / static_cast<double>(n);
  Matrix h(n, n, -inv);
  for (std::size_t i = 0; i < n; ++i) h(i, i) = 1.0 - inv;
  return h;
}

Matrix double_center(const Matrix& k) {
  if (!k.is_square()) throw ShapeError("double centering needs a square matrix");
  const std::size_t n = k.rows();
  std::vector<double> row_mean(n, 0.0);
  std::vector<double> col_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row_mean[i] += k(i, j);
      col_mean[j] += k(i, j);
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    grand += row_mean[i];
    row_mean[i] *= inv;
    col_mean[i] *= inv;
  }
  grand *= inv * inv;
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out(i, j) = k(i, j) - row_mean[i] - col_mean[j] + grand;
    }
  }
  return out;
}

double hsic(const Matrix& k, const Matrix& l) {
  if (!k.is_square() || !l.is_square() || k.rows() != l.rows()) {
    throw ShapeError("hsic needs two square matrices of equal size, got " +
                     std::to_string(k.rows()) + "x" + std::to_string(k.cols()) + " and " +
                     std::to_string(l.rows()) + "x" + std::to_string(l.cols()));
  }
  const std::size_t n = k.rows();
  if (n < 2) throw InvalidArgument("hsic needs n >= 2");
  // tr(K H L H) = tr((H K H) L) by cyclicity and H = H^2.
  const Matrix kc = double_center(k);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) trace += kc(i, j) * l(j, i);
  }
  const double denom = static_cast<double>(n - 1);
  return trace / (denom * denom);
}

std::optional<double> cka(const Matrix& k, const Matrix& l) {
  const double kl = hsic(k, l);
  const double kk = hsic(k, k);
  const double ll = hsic(l, l);
  if (!(kk > 0.0) || !(ll > 0.0)) {
    log::warn("cka undefined: self-HSIC is " + std::to_string(kk <= 0.0 ? kk : ll) +
              " (constant or degenerate RSM)");
    return std::nullopt;
  }
  return kl / std::sqrt(kk * ll);
}

std::optional<double> batched_cka(std::span<const Matrix> k_batches,
                                  std::span<const Matrix> l_batches) {
  if (k_batches.size() != l_batches.size()) {
    throw ShapeError("mini-batch counts differ: " + std::to_string(k_batches.size()) + " vs " +
                     std::to_string(l_batches.size()));
  }
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t b = 0; b < k_batches.size(); ++b) {
    if (const auto v = cka(k_batches[b], l_batches[b])) {
      sum += *v;
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / static_cast<double>(defined);
}

std::vector<Matrix> diagonal_blocks(const Matrix& k, std::size_t batch) {
  if (!k.is_square()) throw ShapeError("diagonal blocks need a square matrix");
  if (batch < 1) throw InvalidArgument("mini-batch size must be >= 1");
  std::vector<Matrix> blocks;
  for (std::size_t first = 0; first < k.rows(); first += batch) {
    const std::size_t len = std::min(batch, k.rows() - first);
    if (len < 2) continue;
    Matrix b(len, len);
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t j = 0; j < len; ++j) b(i, j) = k(first + i, first + j);
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

Matrix cka_layer_matrix(std::span<const LayerRsms> a, std::span<const LayerRsms> b) {
  const Matrix* reference = nullptr;
  auto check = [&](const LayerRsms& layer) {
    for (const auto& m : layer) {
      if (!m.is_square()) throw ShapeError("layer RSMs must be square");
      if (reference == nullptr) {
        reference = &m;
      } else if (m.rows() != reference->rows()) {
        throw ShapeError("layer RSMs differ in size: " + std::to_string(m.rows()) + " vs " +
                         std::to_string(reference->rows()));
      }
    }
  };
  for (const auto& layer : a) check(layer);
  for (const auto& layer : b) check(layer);

  Matrix out(a.size(), b.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    for (std::size_t q = 0; q < b.size(); ++q) {
      const auto v = batched_cka(a[p], b[q]);
      out(p, q) = v.value_or(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

Matrix cka_layer_matrix(std::span<const Matrix> a, std::span<const Matrix> b) {
  std::vector<LayerRsms> la;
  std::vector<LayerRsms> lb;
  for (const auto& m : a) la.push_back({m});
  for (const auto& m : b) lb.push_back({m});
  return cka_layer_matrix(std::span<const LayerRsms>(la), std::span<const LayerRsms>(lb));
}

}  // namespace semrsm
