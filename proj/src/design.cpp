#include "twostage/design.hpp"

#include "twostage/rng.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace twostage {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

std::size_t int_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > SIZE_MAX / base) fail("hypercube: a^r2 overflows");
    out *= base;
  }
  return out;
}

}  // namespace

PoolingDesign::PoolingDesign(std::size_t n, std::vector<std::vector<ItemIndex>> tests)
    : n_(n), tests_(std::move(tests)), item_tests_(n) {
  for (std::size_t t = 0; t < tests_.size(); ++t) {
    auto& members = tests_[t];
    std::sort(members.begin(), members.end());
    if (std::adjacent_find(members.begin(), members.end()) != members.end())
      fail("test " + std::to_string(t) + " contains a duplicate item");
    if (!members.empty() && members.back() >= n)
      fail("test " + std::to_string(t) + " contains item " + std::to_string(members.back()) +
           " outside [0, " + std::to_string(n) + ")");
    for (ItemIndex i : members) item_tests_[i].push_back(static_cast<TestIndex>(t));
  }
}

Family family_of(const SchemeConfig& config) {
  return std::visit(overloaded{
                        [](const scheme::Individual&) { return Family::individual; },
                        [](const scheme::Dorfman&) { return Family::dorfman; },
                        [](const scheme::Bernoulli&) { return Family::bernoulli; },
                        [](const scheme::ConstantTestsPerItem&) { return Family::ctpi; },
                        [](const scheme::DoublyConstant&) { return Family::doubly_constant; },
                        [](const scheme::Hypercube&) { return Family::hypercube; },
                    },
                    config);
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::individual: return "individual";
    case Family::dorfman: return "dorfman";
    case Family::bernoulli: return "bernoulli";
    case Family::ctpi: return "ctpi";
    case Family::doubly_constant: return "dc";
    case Family::hypercube: return "hypercube";
  }
  return "unknown";
}

std::string_view family_name(const SchemeConfig& config) { return family_name(family_of(config)); }

void validate(const SchemeConfig& config, std::size_t n) {
  if (n == 0) fail("item count must be positive");
  std::visit(overloaded{
                 [](const scheme::Individual&) {},
                 [n](const scheme::Dorfman& d) {
                   if (d.s == 0 || d.s > n) fail("dorfman: pool size must lie in [1, n]");
                   if (n % d.s != 0) fail("dorfman: pool size must divide n");
                 },
                 [](const scheme::Bernoulli& b) {
                   if (!(b.pi >= 0.0 && b.pi <= 1.0)) fail("bernoulli: pi must lie in [0, 1]");
                 },
                 [](const scheme::ConstantTestsPerItem& c) {
                   if (c.r == 0) fail("ctpi: r must be at least 1");
                   if (c.t1 == 0 || c.t1 % c.r != 0) fail("ctpi: r must divide t1 (t1 >= r)");
                 },
                 [n](const scheme::DoublyConstant& d) {
                   if (d.r == 0) fail("dc: r must be at least 1");
                   if (d.s == 0 || d.s > n) fail("dc: s must lie in [1, n]");
                   if (n % d.s != 0) fail("dc: s must divide n");
                 },
                 [n](const scheme::Hypercube& h) {
                   if (h.a < 2 || h.r2 < 1) fail("hypercube: need a >= 2 and r2 >= 1");
                   if (int_pow(h.a, h.r2) != n) fail("hypercube: n must equal a^r2");
                 },
             },
             config);
}

std::size_t stage_one_tests(const SchemeConfig& config, std::size_t n) {
  return std::visit(overloaded{
                        [](const scheme::Individual&) -> std::size_t { return 0; },
                        [n](const scheme::Dorfman& d) -> std::size_t { return n / d.s; },
                        [](const scheme::Bernoulli& b) -> std::size_t { return b.t1; },
                        [](const scheme::ConstantTestsPerItem& c) -> std::size_t { return c.t1; },
                        [n](const scheme::DoublyConstant& d) -> std::size_t { return n / d.s * d.r; },
                        [](const scheme::Hypercube& h) -> std::size_t { return h.a * h.r2; },
                    },
                    config);
}

PoolingDesign generate_design(const SchemeConfig& config, std::size_t n, std::uint64_t seed) {
  validate(config, n);
  return std::visit(
      overloaded{
          [n](const scheme::Individual&) { return PoolingDesign(n, {}); },
          [n](const scheme::Dorfman& d) { return dorfman_design(n, d.s); },
          [n, seed](const scheme::Bernoulli& b) { return bernoulli_design(n, b.t1, b.pi, seed); },
          [n, seed](const scheme::ConstantTestsPerItem& c) { return ctpi_design(n, c.t1, c.r, seed); },
          [n, seed](const scheme::DoublyConstant& d) {
            return doubly_constant_design(n, d.r, d.s, seed);
          },
          [](const scheme::Hypercube& h) { return hypercube_design(h.a, h.r2).design(); },
      },
      config);
}

PoolingDesign dorfman_design(std::size_t n, std::size_t s) {
  if (s == 0 || s > n) fail("dorfman: pool size must lie in [1, n]");
  if (n % s != 0) fail("dorfman: pool size must divide n");
  std::vector<std::vector<ItemIndex>> tests(n / s);
  for (std::size_t t = 0; t < tests.size(); ++t) {
    tests[t].resize(s);
    std::iota(tests[t].begin(), tests[t].end(), static_cast<ItemIndex>(t * s));
  }
  return PoolingDesign(n, std::move(tests));
}

PoolingDesign bernoulli_design(std::size_t n, std::size_t t1, double pi, std::uint64_t seed) {
  if (!(pi >= 0.0 && pi <= 1.0)) fail("bernoulli: pi must lie in [0, 1]");
  std::vector<std::vector<ItemIndex>> tests(t1);
  if (pi > 0.0) {
    // Skip ahead by geometric gaps between included items.
    Rng rng = make_rng(seed);
    std::geometric_distribution<std::size_t> gap(pi);
    for (auto& members : tests) {
      std::size_t next = gap(rng);
      while (next < n) {
        members.push_back(static_cast<ItemIndex>(next));
        next += 1 + gap(rng);
      }
    }
  }
  return PoolingDesign(n, std::move(tests));
}

PoolingDesign ctpi_design(std::size_t n, std::size_t t1, std::size_t r, std::uint64_t seed) {
  if (r == 0) fail("ctpi: r must be at least 1");
  if (t1 == 0 || t1 % r != 0) fail("ctpi: r must divide t1 (t1 >= r)");
  const std::size_t per_round = t1 / r;
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, per_round - 1);
  std::vector<std::vector<ItemIndex>> tests(t1);
  for (std::size_t round = 0; round < r; ++round) {
    for (std::size_t i = 0; i < n; ++i) tests[round * per_round + pick(rng)].push_back(static_cast<ItemIndex>(i));
  }
  return PoolingDesign(n, std::move(tests));
}

PoolingDesign doubly_constant_design(std::size_t n, std::size_t r, std::size_t s,
                                     std::uint64_t seed) {
  if (r == 0) fail("dc: r must be at least 1");
  if (s == 0 || s > n) fail("dc: s must lie in [1, n]");
  if (n % s != 0) fail("dc: s must divide n");
  Rng rng = make_rng(seed);
  std::vector<ItemIndex> order(n);
  std::vector<std::vector<ItemIndex>> tests;
  tests.reserve(r * (n / s));
  for (std::size_t round = 0; round < r; ++round) {
    std::iota(order.begin(), order.end(), ItemIndex{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += s)
      tests.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(start + s));
  }
  return PoolingDesign(n, std::move(tests));
}

HypercubeDesign::HypercubeDesign(std::size_t a, std::size_t r2) : a_(a), r2_(r2) {
  if (a < 2 || r2 < 1) fail("hypercube: need a >= 2 and r2 >= 1");
  const std::size_t n = int_pow(a, r2);
  std::vector<std::vector<ItemIndex>> tests(a * r2);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (std::size_t d = 0; d < r2; ++d) {
      tests[d * a + rest % a].push_back(static_cast<ItemIndex>(i));
      rest /= a;
    }
  }
  design_ = PoolingDesign(n, std::move(tests));
}

ItemIndex HypercubeDesign::item_at(std::span<const std::size_t> coords) const {
  if (coords.size() != r2_) fail("hypercube: coordinate vector has wrong dimension");
  std::size_t index = 0;
  for (std::size_t d = r2_; d-- > 0;) {
    if (coords[d] >= a_) fail("hypercube: coordinate out of range");
    index = index * a_ + coords[d];
  }
  return static_cast<ItemIndex>(index);
}

std::vector<std::size_t> HypercubeDesign::coordinates(ItemIndex item) const {
  if (item >= design_.n()) fail("hypercube: item out of range");
  std::vector<std::size_t> coords(r2_);
  std::size_t rest = item;
  for (auto& c : coords) {
    c = rest % a_;
    rest /= a_;
  }
  return coords;
}

TestIndex HypercubeDesign::test_index(std::size_t dim, std::size_t value) const {
  if (dim >= r2_ || value >= a_) fail("hypercube: slice out of range");
  return static_cast<TestIndex>(dim * a_ + value);
}

HypercubeDesign hypercube_design(std::size_t a, std::size_t r2) { return HypercubeDesign(a, r2); }

void write_design_csv(const PoolingDesign& design, std::ostream& out) {
  out << "test_id,item_id\n";
  for (std::size_t t = 0; t < design.t1(); ++t)
    for (ItemIndex i : design.tests()[t]) out << t << ',' << i << '\n';
}

}  // namespace twostage
