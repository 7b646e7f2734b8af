#pragma once

// Seeded Monte Carlo harness for conservative (and non-conservative)
// two-stage schemes.
//
// Trial i of an experiment draws everything from derive_seed(master, i): the
// defective set and a fresh stage-one design. Trials are independent, so the
// harness runs them on a small thread pool and aggregates with integer sums;
// results do not depend on scheduling.

#include "twostage/decoding.hpp"
#include "twostage/design.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace twostage {

struct IidPrior {
  double p = 0.0;
};
struct FixedKPrior {
  std::size_t k = 0;
};
using DefectivePrior = std::variant<IidPrior, FixedKPrior>;

// Prevalence implied by the prior on n items (k/n for fixed-k).
double prevalence(const DefectivePrior& prior, std::size_t n);

ItemSet sample_defectives(const DefectivePrior& prior, std::size_t n, std::uint64_t seed);

struct TrialResult {
  std::size_t t1 = 0;
  std::size_t t2 = 0;
  std::size_t total = 0;
  std::size_t defectives = 0;

  bool operator==(const TrialResult&) const = default;
};

TrialResult run_trial(const SchemeConfig& config, const DefectivePrior& prior, std::size_t n,
                      Mode mode, std::uint64_t seed);

// Seed for trial `index` of an experiment.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index);

struct TrialStatistics {
  double mean_total = 0.0;
  std::size_t decile10 = 0;
  std::size_t decile90 = 0;
};

// Empirical order statistic at ceil(q*M), 1-based, of the totals.
std::size_t empirical_quantile(std::vector<std::size_t> values, double q);

TrialStatistics summarize_trials(std::span<const TrialResult> trials);

struct ExperimentSummary {
  SchemeConfig scheme;
  DefectivePrior prior;
  Mode mode = Mode::conservative;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t t1 = 0;  // stage-one tests per trial
  double mean_total = 0.0;
  std::size_t decile10 = 0;
  std::size_t decile90 = 0;
  double theory_et_per_item = 0.0;
  double theory = 0.0;  // n * theory_et_per_item
  std::uint64_t seed = 0;
};

struct Experiment {
  ExperimentSummary summary;
  std::vector<TrialResult> trials;
};

// threads == 0 uses the hardware concurrency.
Experiment run_experiment(const SchemeConfig& config, const DefectivePrior& prior, std::size_t n,
                          Mode mode, std::size_t trials, std::uint64_t master_seed,
                          unsigned threads = 0);

// The five p = 0.027 configurations: individual (n=1000), Dorfman s=7
// (n=1001), Bernoulli pi=1/27 T1=190, constant tests-per-item r=4 T1=160,
// doubly constant r=4 s=25; conservative mode.
std::vector<Experiment> table1_preset(std::uint64_t master_seed, std::size_t trials = 1000,
                                      unsigned threads = 0);

// Exact expected stage-two count for a doubly constant first stage on n
// items with exactly k defectives:
//   k + (n-k) (1 - C(n-k-1, s-1)/C(n-1, s-1))^r
double exact_dc_fixed_k_et2(std::size_t n, std::size_t k, std::size_t r, std::size_t s);

}  // namespace twostage
