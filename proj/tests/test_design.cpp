#include "twostage/design.hpp"
#include "twostage/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <utility>

using namespace twostage;

namespace {

// Transpose consistency, index ranges and duplicate freedom.
void check_invariants(const PoolingDesign& d) {
  std::set<std::pair<std::size_t, std::size_t>> from_tests;
  for (std::size_t t = 0; t < d.t1(); ++t) {
    const auto& members = d.tests()[t];
    REQUIRE(std::is_sorted(members.begin(), members.end()));
    REQUIRE(std::adjacent_find(members.begin(), members.end()) == members.end());
    for (ItemIndex i : members) {
      REQUIRE(i < d.n());
      from_tests.emplace(t, i);
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> from_items;
  REQUIRE(d.item_tests().size() == d.n());
  for (std::size_t i = 0; i < d.n(); ++i) {
    for (TestIndex t : d.item_tests()[i]) {
      REQUIRE(t < d.t1());
      from_items.emplace(t, i);
    }
  }
  REQUIRE(from_tests == from_items);
}

std::vector<std::size_t> column_weights(const PoolingDesign& d) {
  std::vector<std::size_t> w(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) w[i] = d.item_degree(static_cast<ItemIndex>(i));
  return w;
}

std::vector<std::size_t> divisors(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t s = 1; s <= n; ++s)
    if (n % s == 0) out.push_back(s);
  return out;
}

}  // namespace

TEST_CASE("PoolingDesign rejects malformed tests") {
  CHECK_THROWS_AS(PoolingDesign(3, {{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(PoolingDesign(3, {{1, 1}}), std::invalid_argument);
  const PoolingDesign d(3, {{2, 0}, {}});
  CHECK(d.tests()[0] == std::vector<ItemIndex>{0, 2});
  CHECK(d.test_weight(1) == 0);
  CHECK(d.item_degree(1) == 0);
}

TEST_CASE("dorfman_design") {
  SUBCASE("consecutive blocks") {
    const auto d = dorfman_design(6, 3);
    REQUIRE(d.t1() == 2);
    CHECK(d.tests()[0] == std::vector<ItemIndex>{0, 1, 2});
    CHECK(d.tests()[1] == std::vector<ItemIndex>{3, 4, 5});
    for (auto w : column_weights(d)) CHECK(w == 1);
  }
  SUBCASE("singleton pools") {
    const auto d = dorfman_design(6, 1);
    CHECK(d.t1() == 6);
    for (std::size_t t = 0; t < 6; ++t) CHECK(d.test_weight(static_cast<TestIndex>(t)) == 1);
  }
  SUBCASE("preset size") { CHECK(dorfman_design(1001, 7).t1() == 143); }
  SUBCASE("errors") {
    CHECK_THROWS_AS(dorfman_design(6, 0), std::invalid_argument);
    CHECK_THROWS_AS(dorfman_design(6, 7), std::invalid_argument);
    CHECK_THROWS_AS(dorfman_design(6, 4), std::invalid_argument);
  }
}

TEST_CASE("bernoulli_design") {
  SUBCASE("pi = 1 is full incidence") {
    const auto d = bernoulli_design(4, 3, 1.0, 99);
    for (const auto& t : d.tests()) CHECK(t == std::vector<ItemIndex>{0, 1, 2, 3});
  }
  SUBCASE("pi = 0 is empty") {
    const auto d = bernoulli_design(4, 3, 0.0, 99);
    CHECK(d.t1() == 3);
    for (const auto& t : d.tests()) CHECK(t.empty());
  }
  SUBCASE("mean test weight at the preset is pi*n") {
    // 200 designs of 190 tests: sd of one weight is ~5.97, so the pooled
    // mean has standard error ~0.031.
    const double pi = 1.0 / 27.0;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto d = bernoulli_design(1000, 190, pi, seed);
      for (const auto& t : d.tests()) sum += static_cast<double>(t.size());
      count += d.t1();
    }
    const double mean = sum / static_cast<double>(count);
    const double se = std::sqrt(1000 * pi * (1 - pi) / static_cast<double>(count));
    CHECK(std::abs(mean - 1000 * pi) < 3 * se);
    CHECK(1000 * pi == doctest::Approx(37.0).epsilon(0.001));
  }
  SUBCASE("fixed pair inclusion frequency") {
    const double pi = 0.1;
    const int seeds = 10000;
    int hits = 0;
    for (int seed = 0; seed < seeds; ++seed) {
      const auto d = bernoulli_design(100, 50, pi, static_cast<std::uint64_t>(seed));
      const auto& t = d.tests()[17];
      hits += std::binary_search(t.begin(), t.end(), ItemIndex{42}) ? 1 : 0;
    }
    const double freq = static_cast<double>(hits) / seeds;
    const double se = std::sqrt(pi * (1 - pi) / seeds);
    CHECK(std::abs(freq - pi) < 3 * se);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(bernoulli_design(4, 3, -0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(bernoulli_design(4, 3, 1.5, 1), std::invalid_argument);
  }
}

TEST_CASE("ctpi_design") {
  SUBCASE("one test per round per item") {
    const auto d = ctpi_design(6, 4, 2, 5);
    for (std::size_t i = 0; i < 6; ++i) {
      const auto tests = d.tests_of(static_cast<ItemIndex>(i));
      REQUIRE(tests.size() == 2);
      CHECK(tests[0] < 2);
      CHECK(tests[1] >= 2);
    }
  }
  SUBCASE("preset mean weight") {
    const auto d = ctpi_design(1000, 160, 4, 3);
    std::size_t total = 0;
    for (const auto& t : d.tests()) total += t.size();
    CHECK(static_cast<double>(total) / 160.0 == doctest::Approx(25.0));
    CHECK(scheme::ConstantTestsPerItem{4, 160}.sigma(1000) == doctest::Approx(25.0));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(ctpi_design(6, 5, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(ctpi_design(6, 4, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(ctpi_design(6, 0, 1, 1), std::invalid_argument);
  }
}

TEST_CASE("doubly_constant_design") {
  SUBCASE("small instance") {
    const auto d = doubly_constant_design(6, 2, 3, 11);
    REQUIRE(d.t1() == 4);
    for (const auto& t : d.tests()) CHECK(t.size() == 3);
    for (auto w : column_weights(d)) CHECK(w == 2);
  }
  SUBCASE("r = 1 is a partition into triples") {
    const auto d = doubly_constant_design(6, 1, 3, 4);
    REQUIRE(d.t1() == 2);
    std::vector<ItemIndex> all(d.tests()[0]);
    all.insert(all.end(), d.tests()[1].begin(), d.tests()[1].end());
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<ItemIndex>{0, 1, 2, 3, 4, 5});
  }
  SUBCASE("preset size") { CHECK(doubly_constant_design(1000, 4, 25, 1).t1() == 160); }
  SUBCASE("errors") {
    CHECK_THROWS_AS(doubly_constant_design(6, 2, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(doubly_constant_design(6, 0, 3, 1), std::invalid_argument);
  }
}

TEST_CASE("hypercube_design") {
  SUBCASE("3x3 grid") {
    const auto cube = hypercube_design(3, 2);
    const auto& d = cube.design();
    CHECK(d.n() == 9);
    CHECK(d.t1() == 6);
    for (const auto& t : d.tests()) CHECK(t.size() == 3);
    const std::vector<std::size_t> coords{1, 2};
    const ItemIndex item = cube.item_at(coords);
    CHECK(cube.coordinates(item) == coords);
    const auto tests = d.tests_of(item);
    REQUIRE(tests.size() == 2);
    CHECK(tests[0] == cube.test_index(0, 1));
    CHECK(tests[1] == cube.test_index(1, 2));
  }
  SUBCASE("2x2x2 cube") {
    const auto cube = hypercube_design(2, 3);
    CHECK(cube.design().n() == 8);
    CHECK(cube.design().t1() == 6);
    for (const auto& t : cube.design().tests()) CHECK(t.size() == 4);
    for (auto w : column_weights(cube.design())) CHECK(w == 3);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(hypercube_design(1, 2), std::invalid_argument);
    CHECK_THROWS_AS(hypercube_design(3, 0), std::invalid_argument);
  }
}

TEST_CASE("generators keep transpose consistency over random parameters") {
  Rng rng(20240607);
  std::uniform_int_distribution<std::size_t> pick_n(1, 40);
  std::uniform_int_distribution<int> pick_family(0, 4);
  std::uniform_real_distribution<double> pick_pi(0.0, 1.0);
  for (int iter = 0; iter < 10000; ++iter) {
    const std::size_t n = pick_n(rng);
    const std::uint64_t seed = rng();
    switch (pick_family(rng)) {
      case 0: {
        const auto ds = divisors(n);
        const auto s = ds[std::uniform_int_distribution<std::size_t>(0, ds.size() - 1)(rng)];
        check_invariants(dorfman_design(n, s));
        break;
      }
      case 1: {
        const auto t1 = std::uniform_int_distribution<std::size_t>(0, 30)(rng);
        check_invariants(bernoulli_design(n, t1, pick_pi(rng), seed));
        break;
      }
      case 2: {
        const auto r = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        const auto per_round = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        const auto d = ctpi_design(n, r * per_round, r, seed);
        check_invariants(d);
        for (auto w : column_weights(d)) REQUIRE(w == r);
        for (std::size_t round = 0; round < r; ++round) {
          std::size_t sum = 0;
          for (std::size_t j = 0; j < per_round; ++j) sum += d.tests()[round * per_round + j].size();
          REQUIRE(sum == n);
        }
        break;
      }
      case 3: {
        const auto ds = divisors(n);
        const auto s = ds[std::uniform_int_distribution<std::size_t>(0, ds.size() - 1)(rng)];
        const auto r = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        const auto d = doubly_constant_design(n, r, s, seed);
        check_invariants(d);
        for (const auto& t : d.tests()) REQUIRE(t.size() == s);
        for (auto w : column_weights(d)) REQUIRE(w == r);
        REQUIRE(d.t1() * s == n * r);
        break;
      }
      default: {
        const auto a = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
        const auto r2 = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        check_invariants(hypercube_design(a, r2).design());
        break;
      }
    }
  }
}

TEST_CASE("same seed gives the same design") {
  CHECK(bernoulli_design(200, 30, 0.07, 5) == bernoulli_design(200, 30, 0.07, 5));
  CHECK(ctpi_design(200, 40, 4, 5) == ctpi_design(200, 40, 4, 5));
  CHECK(doubly_constant_design(200, 3, 10, 5) == doubly_constant_design(200, 3, 10, 5));
  CHECK_FALSE(doubly_constant_design(200, 3, 10, 5) == doubly_constant_design(200, 3, 10, 6));
}

TEST_CASE("scheme configs") {
  CHECK(family_name(SchemeConfig{scheme::DoublyConstant{4, 25}}) == "dc");
  CHECK(stage_one_tests(scheme::Dorfman{7}, 1001) == 143);
  CHECK(stage_one_tests(scheme::Bernoulli{1.0 / 27, 190}, 1000) == 190);
  CHECK(stage_one_tests(scheme::ConstantTestsPerItem{4, 160}, 1000) == 160);
  CHECK(stage_one_tests(scheme::DoublyConstant{4, 25}, 1000) == 160);
  CHECK(stage_one_tests(scheme::Hypercube{3, 2}, 9) == 6);
  CHECK(generate_design(scheme::Individual{}, 10, 0).t1() == 0);
  CHECK_THROWS_AS(validate(scheme::Hypercube{3, 2}, 10), std::invalid_argument);
  CHECK_THROWS_AS(validate(scheme::DoublyConstant{4, 7}, 1000), std::invalid_argument);
}

TEST_CASE("design CSV dump") {
  std::ostringstream out;
  write_design_csv(PoolingDesign(3, {{2, 0}, {1}}), out);
  CHECK(out.str() == "test_id,item_id\n0,0\n0,2\n1,1\n");
}
