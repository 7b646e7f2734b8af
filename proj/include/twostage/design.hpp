#pragma once

// Stage-one pooling designs.
//
// A PoolingDesign is the bipartite incidence structure between n items and
// T1 tests. It is immutable once built and keeps both views of the incidence
// (items per test, tests per item) so decoders can walk either direction.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace twostage {

using ItemIndex = std::uint32_t;
using TestIndex = std::uint32_t;

// Sorted, duplicate-free list of item indices.
using ItemSet = std::vector<ItemIndex>;

class PoolingDesign {
 public:
  PoolingDesign() = default;

  // Each inner vector lists the items of one test. Items are sorted on the
  // way in; out-of-range or duplicate items throw std::invalid_argument.
  PoolingDesign(std::size_t n, std::vector<std::vector<ItemIndex>> tests);

  std::size_t n() const noexcept { return n_; }
  std::size_t t1() const noexcept { return tests_.size(); }

  std::span<const ItemIndex> test(TestIndex t) const { return tests_.at(t); }
  std::span<const TestIndex> tests_of(ItemIndex i) const { return item_tests_.at(i); }

  const std::vector<std::vector<ItemIndex>>& tests() const noexcept { return tests_; }
  const std::vector<std::vector<TestIndex>>& item_tests() const noexcept { return item_tests_; }

  std::size_t test_weight(TestIndex t) const { return tests_.at(t).size(); }
  std::size_t item_degree(ItemIndex i) const { return item_tests_.at(i).size(); }

  bool operator==(const PoolingDesign&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<ItemIndex>> tests_;
  std::vector<std::vector<TestIndex>> item_tests_;
};

// ---------------------------------------------------------------------------
// Scheme configurations

enum class Family { individual, dorfman, bernoulli, ctpi, doubly_constant, hypercube };

namespace scheme {

struct Individual {
  bool operator==(const Individual&) const = default;
};

struct Dorfman {
  std::size_t s = 1;  // items per test
  bool operator==(const Dorfman&) const = default;
};

struct Bernoulli {
  double pi = 0.0;  // per (item, test) inclusion probability
  std::size_t t1 = 0;
  bool operator==(const Bernoulli&) const = default;
};

// Constant tests-per-item: r rounds of t1/r tests.
struct ConstantTestsPerItem {
  std::size_t r = 1;
  std::size_t t1 = 1;
  // Mean items per test, n*r/t1.
  double sigma(std::size_t n) const { return static_cast<double>(n * r) / static_cast<double>(t1); }
  bool operator==(const ConstantTestsPerItem&) const = default;
};

struct DoublyConstant {
  std::size_t r = 1;  // tests per item
  std::size_t s = 1;  // items per test
  bool operator==(const DoublyConstant&) const = default;
};

// a^r2 items on an r2-dimensional grid of side a, one test per axis slice.
struct Hypercube {
  std::size_t a = 2;
  std::size_t r2 = 1;
  bool operator==(const Hypercube&) const = default;
};

}  // namespace scheme

using SchemeConfig = std::variant<scheme::Individual, scheme::Dorfman, scheme::Bernoulli,
                                  scheme::ConstantTestsPerItem, scheme::DoublyConstant,
                                  scheme::Hypercube>;

Family family_of(const SchemeConfig& config);
std::string_view family_name(Family family);
std::string_view family_name(const SchemeConfig& config);

// Throws std::invalid_argument when the parameters cannot be used with n items.
void validate(const SchemeConfig& config, std::size_t n);

// Number of stage-one tests the scheme uses on n items.
std::size_t stage_one_tests(const SchemeConfig& config, std::size_t n);

// Build the stage-one design for a scheme. Deterministic given seed;
// deterministic schemes ignore it. Individual testing yields an empty design.
PoolingDesign generate_design(const SchemeConfig& config, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Generators

// n/s consecutive blocks of s items.
PoolingDesign dorfman_design(std::size_t n, std::size_t s);

PoolingDesign bernoulli_design(std::size_t n, std::size_t t1, double pi, std::uint64_t seed);

// r rounds; in each round every item joins one of the t1/r round-tests
// uniformly and independently.
PoolingDesign ctpi_design(std::size_t n, std::size_t t1, std::size_t r, std::uint64_t seed);

// r rounds; each round is a uniformly random partition of the items into
// n/s tests of exactly s items.
PoolingDesign doubly_constant_design(std::size_t n, std::size_t r, std::size_t s,
                                     std::uint64_t seed);

class HypercubeDesign {
 public:
  HypercubeDesign(std::size_t a, std::size_t r2);

  std::size_t side() const noexcept { return a_; }
  std::size_t dimension() const noexcept { return r2_; }
  const PoolingDesign& design() const noexcept { return design_; }

  // Items are numbered little-endian in their coordinates:
  // index = c[0] + c[1]*a + c[2]*a^2 + ...
  ItemIndex item_at(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> coordinates(ItemIndex item) const;

  // Test holding every item whose coordinate along `dim` equals `value`.
  TestIndex test_index(std::size_t dim, std::size_t value) const;

 private:
  std::size_t a_;
  std::size_t r2_;
  PoolingDesign design_;
};

HypercubeDesign hypercube_design(std::size_t a, std::size_t r2);

// CSV with header test_id,item_id; rows sorted by (test_id, item_id).
void write_design_csv(const PoolingDesign& design, std::ostream& out);

}  // namespace twostage
