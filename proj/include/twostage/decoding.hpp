#pragma once

// Stage-one outcomes and the DND / DD classification that decides how many
// items go on to individual stage-two tests.

#include "twostage/design.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace twostage {

// outcome[t] is true when test t is positive.
using OutcomeVector = std::vector<bool>;

enum class Mode { conservative, nonconservative };

struct Classification {
  ItemSet dnd;  // definite nondefectives: in at least one negative test
  ItemSet dd;   // definite defectives: alone among non-DNDs in a positive test
  std::size_t stage2_conservative = 0;     // n - |dnd|
  std::size_t stage2_nonconservative = 0;  // n - |dnd| - |dd|
};

// A test is positive iff it contains a defective. Empty tests are negative.
OutcomeVector run_tests(const PoolingDesign& design, std::span<const ItemIndex> defectives);

ItemSet dnd_set(const PoolingDesign& design, const OutcomeVector& outcomes);

// Single pass: no iterated elimination.
ItemSet dd_set(const PoolingDesign& design, const OutcomeVector& outcomes);

Classification classify(const PoolingDesign& design, const OutcomeVector& outcomes);

// Items retested individually in stage two.
std::size_t stage2_count(const PoolingDesign& design, const OutcomeVector& outcomes, Mode mode);

struct HypercubeResult {
  enum class Kind { all_clear, resolved, unresolved };
  Kind kind = Kind::unresolved;
  std::optional<ItemIndex> item;  // set only when resolved
};

// Exactly one positive slice per dimension pins down a single item; all
// negative means no defectives; anything else needs further testing.
HypercubeResult hypercube_decode(const HypercubeDesign& cube, const OutcomeVector& outcomes);

}  // namespace twostage
