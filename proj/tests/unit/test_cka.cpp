#include <doctest.h>

#include <cmath>
#include <random>

#include "semrsm/cka.hpp"
#include "semrsm/error.hpp"
#include "support/oracles.hpp"

using namespace semrsm;

TEST_CASE("centering matrix") {
  CHECK(centering_matrix(2) == Matrix(2, 2, std::vector<double>{0.5, -0.5, -0.5, 0.5}));
  CHECK(centering_matrix(1) == Matrix(1, 1, std::vector<double>{0.0}));
  const auto h = centering_matrix(5);
  for (std::size_t i = 0; i < 5; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < 5; ++j) row += h(i, j);
    CHECK(std::abs(row) <= 1e-15);
  }
  CHECK_THROWS_AS(centering_matrix(0), InvalidArgument);
}

TEST_CASE("double centering equals H K H") {
  std::mt19937_64 rng(1);
  const auto k = testdata::random_gram(rng, 6, 3);
  const auto h = centering_matrix(6);
  const auto expect = oracle::multiply(oracle::multiply(h, k), h);
  const auto got = double_center(k);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(got(i, j) == doctest::Approx(expect(i, j)).epsilon(1e-12));
}

TEST_CASE("hsic") {
  CHECK(hsic(Matrix::identity(2), Matrix::identity(2)) == doctest::Approx(1.0).epsilon(1e-15));
  std::mt19937_64 rng(2);
  const auto k = testdata::random_gram(rng, 5, 2);
  Matrix ones(5, 5, std::vector<double>(25, 1.0));
  CHECK(std::abs(hsic(k, ones)) <= 1e-12);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 9;
    const auto a = testdata::random_gram(rng, n, 3);
    const auto b = testdata::random_gram(rng, n, 4);
    CHECK(hsic(a, b) == doctest::Approx(oracle::hsic(a, b)).epsilon(1e-10));
    CHECK(hsic(a, b) == doctest::Approx(hsic(b, a)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hsic(Matrix::identity(2), Matrix::identity(3)), ShapeError);
  CHECK_THROWS_AS(hsic(Matrix(2, 3), Matrix(2, 3)), ShapeError);
  CHECK_THROWS_AS(hsic(Matrix::identity(1), Matrix::identity(1)), InvalidArgument);
}

TEST_CASE("cka") {
  CHECK(*cka(Matrix::identity(2), Matrix::identity(2)) == doctest::Approx(1.0));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto k = testdata::random_gram(rng, 10, 4);
    const auto l = testdata::random_gram(rng, 10, 3);
    CHECK(*cka(k, k) == doctest::Approx(1.0).epsilon(1e-12));
    const double v = *cka(k, l);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
    CHECK(v == doctest::Approx(*cka(l, k)).epsilon(1e-12));
    Matrix scaled = k;
    for (auto& x : scaled.data()) x *= 3.5;
    CHECK(*cka(scaled, l) == doctest::Approx(v).epsilon(1e-12));
  }
  Matrix ones(4, 4, std::vector<double>(16, 1.0));
  CHECK_FALSE(cka(ones, Matrix::identity(4)).has_value());
}

TEST_CASE("batched cka and diagonal blocks") {
  std::mt19937_64 rng(4);
  const auto k = testdata::random_gram(rng, 10, 3);
  const auto blocks = diagonal_blocks(k, 4);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[2].rows() == 2);
  CHECK(blocks[1](0, 1) == k(4, 5));
  CHECK(diagonal_blocks(k, 3).size() == 3);  // trailing single sample dropped

  const auto l = testdata::random_gram(rng, 10, 3);
  const auto lb = diagonal_blocks(l, 4);
  double mean = 0;
  for (std::size_t i = 0; i < 3; ++i) mean += *cka(blocks[i], lb[i]);
  CHECK(*batched_cka(blocks, lb) == doctest::Approx(mean / 3));
}

TEST_CASE("layer matrix") {
  std::mt19937_64 rng(5);
  const auto k = testdata::random_gram(rng, 10, 3);
  std::vector<Matrix> one{k};
  CHECK(cka_layer_matrix(one, one)(0, 0) == doctest::Approx(1.0));

  Matrix twice = k;
  for (auto& x : twice.data()) x *= 2;
  std::vector<Matrix> layers{k, twice};
  const auto grid = cka_layer_matrix(layers, layers);
  for (double v : grid.values()) CHECK(v == doctest::Approx(1.0));

  std::vector<Matrix> a, b;
  for (int i = 0; i < 3; ++i) a.push_back(testdata::random_gram(rng, 10, 2));
  for (int i = 0; i < 4; ++i) b.push_back(testdata::random_gram(rng, 10, 2));
  const auto rect = cka_layer_matrix(a, b);
  CHECK(rect.rows() == 3);
  CHECK(rect.cols() == 4);
  for (double v : rect.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
  }
  std::vector<Matrix> wrong{Matrix::identity(3)};
  CHECK_THROWS_AS(cka_layer_matrix(one, wrong), ShapeError);
}
