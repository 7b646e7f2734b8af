#include "twostage/decoding.hpp"

#include <stdexcept>
#include <string>

namespace twostage {

namespace {

void check_lengths(const PoolingDesign& design, const OutcomeVector& outcomes) {
  if (outcomes.size() != design.t1())
    throw std::invalid_argument("outcome vector has length " + std::to_string(outcomes.size()) +
                                " but design has " + std::to_string(design.t1()) + " tests");
}

std::vector<bool> dnd_mask(const PoolingDesign& design, const OutcomeVector& outcomes) {
  check_lengths(design, outcomes);
  std::vector<bool> mask(design.n(), false);
  for (std::size_t t = 0; t < design.t1(); ++t) {
    if (outcomes[t]) continue;
    for (ItemIndex i : design.tests()[t]) mask[i] = true;
  }
  return mask;
}

ItemSet to_set(const std::vector<bool>& mask) {
  ItemSet out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(static_cast<ItemIndex>(i));
  return out;
}

std::vector<bool> dd_mask(const PoolingDesign& design, const OutcomeVector& outcomes,
                          const std::vector<bool>& dnd) {
  std::vector<bool> mask(design.n(), false);
  for (std::size_t t = 0; t < design.t1(); ++t) {
    if (!outcomes[t]) continue;
    const auto& members = design.tests()[t];
    std::size_t unexplained = 0;
    ItemIndex candidate = 0;
    for (ItemIndex i : members) {
      if (!dnd[i]) {
        ++unexplained;
        candidate = i;
      }
    }
    // With consistent outcomes a positive test always holds a non-DND item;
    // zero unexplained members only arises from inconsistent input.
    if (unexplained == 1) mask[candidate] = true;
  }
  return mask;
}

}  // namespace

OutcomeVector run_tests(const PoolingDesign& design, std::span<const ItemIndex> defectives) {
  OutcomeVector outcomes(design.t1(), false);
  for (ItemIndex i : defectives) {
    if (i >= design.n())
      throw std::invalid_argument("defective item " + std::to_string(i) + " outside [0, " +
                                  std::to_string(design.n()) + ")");
    for (TestIndex t : design.tests_of(i)) outcomes[t] = true;
  }
  return outcomes;
}

ItemSet dnd_set(const PoolingDesign& design, const OutcomeVector& outcomes) {
  return to_set(dnd_mask(design, outcomes));
}

ItemSet dd_set(const PoolingDesign& design, const OutcomeVector& outcomes) {
  return to_set(dd_mask(design, outcomes, dnd_mask(design, outcomes)));
}

Classification classify(const PoolingDesign& design, const OutcomeVector& outcomes) {
  const auto dnd = dnd_mask(design, outcomes);
  Classification out;
  out.dnd = to_set(dnd);
  out.dd = to_set(dd_mask(design, outcomes, dnd));
  out.stage2_conservative = design.n() - out.dnd.size();
  out.stage2_nonconservative = out.stage2_conservative - out.dd.size();
  return out;
}

std::size_t stage2_count(const PoolingDesign& design, const OutcomeVector& outcomes, Mode mode) {
  const auto dnd = dnd_mask(design, outcomes);
  std::size_t remaining = design.n();
  for (bool ruled_out : dnd) remaining -= ruled_out ? 1 : 0;
  if (mode == Mode::conservative) return remaining;
  for (bool certain : dd_mask(design, outcomes, dnd)) remaining -= certain ? 1 : 0;
  return remaining;
}

HypercubeResult hypercube_decode(const HypercubeDesign& cube, const OutcomeVector& outcomes) {
  check_lengths(cube.design(), outcomes);
  const std::size_t a = cube.side();
  std::vector<std::size_t> coords(cube.dimension());
  bool any_positive = false;
  bool ambiguous = false;
  for (std::size_t d = 0; d < cube.dimension(); ++d) {
    std::size_t positives = 0;
    for (std::size_t j = 0; j < a; ++j) {
      if (outcomes[cube.test_index(d, j)]) {
        ++positives;
        coords[d] = j;
      }
    }
    any_positive = any_positive || positives > 0;
    ambiguous = ambiguous || positives != 1;
  }
  if (!any_positive) return {HypercubeResult::Kind::all_clear, std::nullopt};
  if (ambiguous) return {HypercubeResult::Kind::unresolved, std::nullopt};
  return {HypercubeResult::Kind::resolved, cube.item_at(coords)};
}

}  // namespace twostage
