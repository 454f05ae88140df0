#include <doctest.h>

#include <random>

#include "semrsm/error.hpp"
#include "semrsm/kernels.hpp"
#include "semrsm/rsm.hpp"
#include "support/oracles.hpp"

using namespace semrsm;

namespace {

RepresentationBatch random_batch(std::mt19937_64& rng, std::size_t n, std::size_t c, std::size_t s) {
  return RepresentationBatch(n, c, s, testdata::gaussian(rng, n * c * s));
}

/// Sample 0 is Gaussian, every other sample is a random spatial permutation of it.
RepresentationBatch permuted_copies(std::mt19937_64& rng, std::size_t n, std::size_t c, std::size_t s) {
  const auto base = testdata::gaussian(rng, c * s);
  std::vector<double> data(base);
  for (std::size_t i = 1; i < n; ++i) {
    const auto p = testdata::permute_columns(base, c, s, testdata::permutation(rng, s));
    data.insert(data.end(), p.begin(), p.end());
  }
  return RepresentationBatch(n, c, s, std::move(data));
}

}  // namespace

TEST_CASE("spatially swapped copy") {
  // Two samples, C = S = 2: (e0, e1) and its swap (e1, e0).
  RepresentationBatch z(2, 2, 2, {1, 0, 0, 1, 0, 1, 1, 0});
  const auto spatio = spatio_semantic_rsm(z, KernelSpec::linear());
  CHECK(spatio.values(0, 1) == 0.0);
  CHECK(spatio.values(0, 0) == 2.0);
  const auto semantic = semantic_rsm(z, KernelSpec::linear(), MatcherSpec::optimal());
  CHECK(semantic.values(0, 1) == 2.0);
  CHECK(semantic.values(1, 0) == 2.0);
  CHECK(semantic.kind == MatrixKind::square_symmetric);
  CHECK_NOTHROW(semantic.validate());
}

TEST_CASE("rbf diagonal is one and the matrix validates") {
  std::mt19937_64 rng(1);
  const auto z = random_batch(rng, 6, 4, 5);
  for (const auto& m : {MatcherSpec::none(), MatcherSpec::optimal(), MatcherSpec::greedy(),
                        MatcherSpec::batch_optimal(2), MatcherSpec::topk_greedy(3)}) {
    const auto k = compute_rsm(z, KernelSpec::rbf_median(), m);
    for (std::size_t i = 0; i < 6; ++i) CHECK(k.values(i, i) == 1.0);
    CHECK_NOTHROW(k.validate());
    CHECK(k.sigma.has_value());
    CHECK(k.matcher == m);
  }
}

TEST_CASE("single sample") {
  RepresentationBatch z(1, 2, 3, {1, 2, 3, 4, 5, 6});
  const auto a = spatio_semantic_rsm(z, KernelSpec::linear());
  const auto b = semantic_rsm(z, KernelSpec::linear(), MatcherSpec::optimal());
  CHECK(a.values.rows() == 1);
  CHECK(a.values(0, 0) == 91.0);
  CHECK(b.values == a.values);
}

TEST_CASE("semantic matcher none is rejected") {
  RepresentationBatch z(2, 1, 1, {1, 2});
  CHECK_THROWS_AS(semantic_rsm(z, KernelSpec::linear(), MatcherSpec::none()), InvalidArgument);
}

TEST_CASE("optimal linear semantic dominates spatio-semantic") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    const auto z = random_batch(rng, 7, 3, 6);
    const auto spatio = spatio_semantic_rsm(z, KernelSpec::linear());
    const auto semantic = semantic_rsm(z, KernelSpec::linear(), MatcherSpec::optimal());
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) CHECK(semantic.values(i, j) >= spatio.values(i, j) - 1e-12);
  }
}

TEST_CASE("semantic RSM is invariant to spatial permutations") {
  std::mt19937_64 rng(3);
  const auto z = permuted_copies(rng, 5, 8, 10);
  const auto k = semantic_rsm(z, KernelSpec::rbf_median(), MatcherSpec::optimal());
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(k.values(i, j) == doctest::Approx(1.0).epsilon(1e-12));
  const auto s = spatio_semantic_rsm(z, KernelSpec::rbf_median());
  CHECK(s.values(0, 1) < 1.0);
}

TEST_CASE("matches a direct per-pair computation") {
  std::mt19937_64 rng(4);
  const auto z = random_batch(rng, 5, 3, 4);
  const auto k = semantic_rsm(z, KernelSpec::linear(), MatcherSpec::optimal());
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      if (i == j) continue;
      const auto a = affinity(z.sample(i), z.sample(j), 3, 4);
      // Linear kernel after optimal alignment equals the optimal total.
      CHECK(k.values(i, j) == doctest::Approx(oracle::max_assignment(a.values).best).epsilon(1e-12));
    }
}

TEST_CASE("sigma uses the whole batch") {
  std::mt19937_64 rng(5);
  const auto z = random_batch(rng, 6, 2, 3);
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < 6; ++i) pts.emplace_back(z.sample(i).begin(), z.sample(i).end());
  CHECK(batch_median_sigma(z) == doctest::Approx(oracle::median_sigma(pts)).epsilon(1e-12));
  const auto k = spatio_semantic_rsm(z, KernelSpec::rbf_median());
  CHECK(*k.sigma == doctest::Approx(oracle::median_sigma(pts)).epsilon(1e-12));
  CHECK(k.values(0, 1) == doctest::Approx(rbf_kernel(z.sample(0), z.sample(1), *k.sigma)));
}

TEST_CASE("thread count does not change results") {
  std::mt19937_64 rng(6);
  const auto z = random_batch(rng, 9, 4, 8);
  std::vector<PairPermutation> serial_perms, pooled_perms;
  RsmOptions serial;
  serial.permutations = &serial_perms;
  const auto a = semantic_rsm(z, KernelSpec::rbf_median(), MatcherSpec::batch_optimal(3), serial);
  WorkerPool pool(4);
  RsmOptions pooled;
  pooled.pool = &pool;
  pooled.permutations = &pooled_perms;
  const auto b = semantic_rsm(z, KernelSpec::rbf_median(), MatcherSpec::batch_optimal(3), pooled);
  CHECK(a.values == b.values);
  REQUIRE(serial_perms.size() == 36);
  REQUIRE(pooled_perms.size() == 36);
  for (std::size_t i = 0; i < serial_perms.size(); ++i) {
    CHECK(serial_perms[i].row == pooled_perms[i].row);
    CHECK(serial_perms[i].col == pooled_perms[i].col);
    CHECK(serial_perms[i].permutation == pooled_perms[i].permutation);
  }
}

TEST_CASE("progress callback reaches the total") {
  std::mt19937_64 rng(7);
  const auto z = random_batch(rng, 5, 2, 3);
  std::size_t last = 0, total = 0;
  RsmOptions opts;
  opts.progress = [&](std::size_t done, std::size_t all) {
    last = done;
    total = all;
  };
  semantic_rsm(z, KernelSpec::linear(), MatcherSpec::greedy(), opts);
  CHECK(total > 0);
  CHECK(last == total);
}

TEST_CASE("cross similarity") {
  std::mt19937_64 rng(8);
  const auto z = random_batch(rng, 7, 3, 4);
  SUBCASE("equals the spatio-semantic RSM for matcher none") {
    const auto cross = cross_similarity(z, z, KernelSpec::linear(), MatcherSpec::none(), 3);
    const auto rsm = spatio_semantic_rsm(z, KernelSpec::linear());
    CHECK(cross.kind == MatrixKind::rectangular);
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) CHECK(cross.values(i, j) == doctest::Approx(rsm.values(i, j)).epsilon(1e-14));
  }
  SUBCASE("identical query scores 1 under cosine") {
    const auto q = z.slice(4, 1);
    const auto cross = cross_similarity(q, z, KernelSpec::cosine(), MatcherSpec::none(), 100);
    CHECK(cross.values(0, 4) == doctest::Approx(1.0));
    for (std::size_t j = 0; j < 7; ++j) CHECK(cross.values(0, j) <= cross.values(0, 4));
  }
  SUBCASE("block size does not matter for linear and cosine") {
    const auto q = random_batch(rng, 5, 3, 4);
    for (const auto& kernel : {KernelSpec::linear(), KernelSpec::cosine()}) {
      for (const auto& m : {MatcherSpec::none(), MatcherSpec::optimal()}) {
        const auto one = cross_similarity(q, z, kernel, m, 1);
        const auto all = cross_similarity(q, z, kernel, m, 5);
        CHECK(one.values == all.values);
      }
    }
  }
  SUBCASE("global sigma is blocking invariant") {
    const auto q = random_batch(rng, 5, 3, 4);
    RsmOptions opts;
    opts.global_sigma = true;
    const auto one = cross_similarity(q, z, KernelSpec::rbf_median(), MatcherSpec::none(), 1, opts);
    const auto all = cross_similarity(q, z, KernelSpec::rbf_median(), MatcherSpec::none(), 100, opts);
    CHECK(one.values == all.values);
    CHECK(one.sigma.has_value());
  }
  SUBCASE("shape mismatch") {
    const auto other = random_batch(rng, 2, 3, 5);
    CHECK_THROWS_AS(cross_similarity(other, z, KernelSpec::linear(), MatcherSpec::none(), 1), ShapeError);
  }
}
