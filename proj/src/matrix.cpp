#include "semrsm/matrix.hpp"

#include <string>

#include "semrsm/error.hpp"

namespace semrsm {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ShapeError("matrix of shape " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                     " cannot hold " + std::to_string(values_.size()) + " values");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

}  // namespace semrsm
