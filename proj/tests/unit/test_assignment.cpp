#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "semrsm/assignment.hpp"
#include "semrsm/error.hpp"
#include "support/oracles.hpp"

using namespace semrsm;
using P = std::vector<std::size_t>;

namespace {

AffinityMatrix make(std::size_t n, std::vector<double> values, std::vector<double> rn = {},
                    std::vector<double> cn = {}) {
  AffinityMatrix a;
  a.values = Matrix(n, n, std::move(values));
  a.row_norms = rn.empty() ? std::vector<double>(n, 1.0) : std::move(rn);
  a.col_norms = cn.empty() ? std::vector<double>(n, 1.0) : std::move(cn);
  return a;
}

AffinityMatrix random_affinity(std::mt19937_64& rng, std::size_t c, std::size_t s) {
  const auto zi = testdata::gaussian(rng, c * s);
  const auto zj = testdata::gaussian(rng, c * s);
  return affinity(zi, zj, c, s);
}

bool is_bijection(const P& p) {
  std::set<std::size_t> seen(p.begin(), p.end());
  return seen.size() == p.size() && (p.empty() || *seen.rbegin() == p.size() - 1);
}

}  // namespace

TEST_CASE("affinity of concept vectors") {
  // C = S = 2; columns are spatial locations.
  const std::vector<double> e01{1, 0, 0, 1};
  const std::vector<double> e10{0, 1, 1, 0};
  CHECK(affinity(e01, e01, 2, 2).values == Matrix::identity(2));
  CHECK(affinity(e01, e10, 2, 2).values == Matrix(2, 2, std::vector<double>{0, 1, 1, 0}));
  const auto zero = affinity(e01, std::vector<double>(4, 0.0), 2, 2);
  CHECK(zero.values == Matrix(2, 2));
  CHECK(zero.col_norms == std::vector<double>{0, 0});
  CHECK_THROWS_AS(affinity(e01, std::vector<double>{1, 2, 3}, 2, 2), ShapeError);
}

TEST_CASE("affinity matches explicit inner products") {
  std::mt19937_64 rng(1);
  const std::size_t c = 3, s = 4;
  const auto zi = testdata::gaussian(rng, c * s);
  const auto zj = testdata::gaussian(rng, c * s);
  const auto a = affinity(zi, zj, c, s);
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = 0; y < s; ++y) {
      double dot = 0;
      for (std::size_t ch = 0; ch < c; ++ch) dot += zi[ch * s + x] * zj[ch * s + y];
      CHECK(a.values(x, y) == doctest::Approx(dot).epsilon(1e-14));
    }
  for (std::size_t x = 0; x < s; ++x) {
    double n2 = 0;
    for (std::size_t ch = 0; ch < c; ++ch) n2 += zi[ch * s + x] * zi[ch * s + x];
    CHECK(a.row_norms[x] == doctest::Approx(std::sqrt(n2)));
  }
}

TEST_CASE("optimal solver examples") {
  auto r = solve_optimal(make(2, {0, 5, 5, 0}));
  CHECK(r.permutation == P{1, 0});
  CHECK(r.total_affinity == 10.0);
  r = solve_optimal(make(3, Matrix::identity(3).values()));
  CHECK(r.permutation == P{0, 1, 2});
  CHECK(r.total_affinity == 3.0);
  r = solve_optimal(make(2, {4, 3, 3, 0}));
  CHECK(r.permutation == P{1, 0});
  CHECK(r.total_affinity == 6.0);
  CHECK(r.method == MatcherSpec::optimal());
}

TEST_CASE("optimal solver matches brute force") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 120; ++t) {
    const std::size_t s = 2 + t % 6;
    const auto a = random_affinity(rng, 4, s);
    const auto r = solve_optimal(a);
    REQUIRE(is_bijection(r.permutation));
    CHECK(r.total_affinity == doctest::Approx(oracle::max_assignment(a.values).best).epsilon(1e-12));
    CHECK(r.total_affinity == doctest::Approx(assignment_total(a.values, r.permutation)));
  }
}

TEST_CASE("greedy examples") {
  auto r = solve_greedy(make(2, {4, 3, 3, 0}, {2, 1}, {2, 1}));
  CHECK(r.permutation == P{0, 1});
  CHECK(r.total_affinity == 4.0);
  r = solve_greedy(make(3, Matrix::identity(3).values(), {0.1, 5, 2}));
  CHECK(r.permutation == P{0, 1, 2});
  CHECK(r.total_affinity == 3.0);
  r = solve_greedy(make(1, {-2.0}));
  CHECK(r.permutation == P{0});
}

TEST_CASE("topk-greedy examples") {
  const auto a = make(2, {4, 3, 3, 0}, {2, 1}, {2, 1});
  auto r = solve_topk_greedy(a, 1);
  CHECK(r.permutation == P{0, 1});
  CHECK(r.total_affinity == 4.0);
  CHECK(solve_topk_greedy(a, 2).total_affinity == 6.0);
  CHECK_THROWS_AS(solve_topk_greedy(a, 0), InvalidArgument);
  CHECK_THROWS_AS(solve_topk_greedy(a, 3), InvalidArgument);

  std::mt19937_64 rng(4);
  for (int t = 0; t < 40; ++t) {
    const auto g = random_affinity(rng, 3, 6);
    CHECK(solve_topk_greedy(g, 6).total_affinity == doctest::Approx(solve_optimal(g).total_affinity));
  }
}

TEST_CASE("diagonal-dominant affinity yields identity for every matcher") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const std::size_t s = 4;
    Matrix m(s, s);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j) m(i, j) = i == j ? 10.0 + i : off(rng);
    std::vector<double> norms(s);
    for (auto& n : norms) n = std::abs(off(rng)) + 0.1;
    auto a = make(s, m.values(), norms, norms);
    REQUIRE(oracle::max_assignment(m).permutation == P{0, 1, 2, 3});
    for (std::size_t k = 1; k <= s; ++k) CHECK(solve_topk_greedy(a, k).permutation == P{0, 1, 2, 3});
    CHECK(solve_greedy(a).permutation == P{0, 1, 2, 3});
    CHECK(solve_optimal(a).permutation == P{0, 1, 2, 3});
  }
}

TEST_CASE("batch-optimal") {
  std::mt19937_64 rng(6);
  SUBCASE("b >= S is exact") {
    for (int t = 0; t < 20; ++t) {
      const auto a = random_affinity(rng, 5, 7);
      const auto opt = solve_optimal(a);
      for (std::size_t b : {7, 8, 512}) {
        CHECK(solve_batch_optimal(a, b).total_affinity == doctest::Approx(opt.total_affinity).epsilon(1e-12));
      }
    }
  }
  SUBCASE("b = 1 pairs norm ranks") {
    for (int t = 0; t < 20; ++t) {
      const auto a = random_affinity(rng, 5, 9);
      const auto r = solve_batch_optimal(a, 1);
      const auto rows = descending_order(a.row_norms);
      const auto cols = descending_order(a.col_norms);
      for (std::size_t i = 0; i < rows.size(); ++i) CHECK(r.permutation[rows[i]] == cols[i]);
    }
  }
  SUBCASE("b = 4 on 8x8 lies between identity and optimal") {
    for (int t = 0; t < 50; ++t) {
      const auto a = random_affinity(rng, 6, 8);
      const auto r = solve_batch_optimal(a, 4);
      REQUIRE(is_bijection(r.permutation));
      const double best = oracle::max_assignment(a.values).best;
      CHECK(r.total_affinity <= best + 1e-9);
      CHECK(solve_optimal(a).total_affinity == doctest::Approx(best).epsilon(1e-12));
    }
  }
  SUBCASE("b = 0 is rejected") {
    CHECK_THROWS_AS(solve_batch_optimal(random_affinity(rng, 2, 3), 0), InvalidArgument);
  }
}

TEST_CASE("every matcher returns a bijection bounded by the optimum") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 60; ++t) {
    const std::size_t s = 1 + t % 7;
    const auto a = random_affinity(rng, 3, s);
    const double best = oracle::max_assignment(a.values).best;
    for (const auto& spec : {MatcherSpec::none(), MatcherSpec::optimal(), MatcherSpec::greedy(),
                             MatcherSpec::topk_greedy(1), MatcherSpec::batch_optimal(2)}) {
      const auto r = solve(a, spec);
      REQUIRE(is_bijection(r.permutation));
      CHECK(r.total_affinity <= best + 1e-9);
      CHECK(r.total_affinity == doctest::Approx(assignment_total(a.values, r.permutation)));
      CHECK(r.method == spec);
    }
  }
}

TEST_CASE("identity assignment") {
  CHECK(identity_assignment(3).permutation == P{0, 1, 2});
  CHECK(identity_assignment(make(2, {0, 5, 5, 0})).total_affinity == 0.0);
  CHECK(identity_assignment(make(3, Matrix::identity(3).values())).total_affinity == 3.0);
  CHECK(solve(make(2, {1, 5, 5, 2}), MatcherSpec::none()).total_affinity == 3.0);
}

TEST_CASE("quality ratio") {
  const auto a = make(2, {4, 3, 3, 0}, {2, 1}, {2, 1});
  const auto opt = solve_optimal(a);
  CHECK(quality_ratio(opt, opt) == 1.0);
  CHECK(*quality_ratio(solve_greedy(a), opt) == doctest::Approx(2.0 / 3.0));
  const auto swap = make(2, {0, 5, 5, 0});
  CHECK(quality_ratio(identity_assignment(swap), solve_optimal(swap)) == 0.0);
  const auto zeros = make(2, {0, 0, 0, 0});
  CHECK_FALSE(quality_ratio(identity_assignment(zeros), solve_optimal(zeros)).has_value());
}

TEST_CASE("permute_spatial and descending_order") {
  const std::vector<double> z{1, 2, 3, 4, 5, 6};  // C = 2, S = 3
  std::vector<double> out(6);
  const P perm{2, 0, 1};
  permute_spatial(z, 2, 3, perm, out);
  CHECK(out == testdata::permute_columns(z, 2, 3, perm));
  CHECK(out == std::vector<double>{3, 1, 2, 6, 4, 5});
  CHECK(descending_order(std::vector<double>{1, 3, 3, 2}) == P{1, 2, 3, 0});
}

TEST_CASE("recovering a planted permutation") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const std::size_t c = 16, s = 12;
    const auto zi = testdata::gaussian(rng, c * s);
    const auto perm = testdata::permutation(rng, s);
    const auto zj = testdata::permute_columns(zi, c, s, perm);
    const auto r = solve_optimal(affinity(zi, zj, c, s));
    // Row a of zi lives at column p in zj where perm[p] = a.
    for (std::size_t a = 0; a < s; ++a) CHECK(perm[r.permutation[a]] == a);
  }
}
