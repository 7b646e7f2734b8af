#include "twostage/simulate.hpp"

#include "twostage/rng.hpp"
#include "twostage/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace twostage {

namespace {

constexpr std::uint64_t kDefectiveStream = 0;
constexpr std::uint64_t kDesignStream = 1;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

double prevalence(const DefectivePrior& prior, std::size_t n) {
  if (const auto* iid = std::get_if<IidPrior>(&prior)) return iid->p;
  return static_cast<double>(std::get<FixedKPrior>(prior).k) / static_cast<double>(n);
}

ItemSet sample_defectives(const DefectivePrior& prior, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  ItemSet out;
  if (const auto* iid = std::get_if<IidPrior>(&prior)) {
    require(iid->p >= 0.0 && iid->p <= 1.0, "iid prior: p must lie in [0, 1]");
    std::bernoulli_distribution coin(iid->p);
    for (std::size_t i = 0; i < n; ++i)
      if (coin(rng)) out.push_back(static_cast<ItemIndex>(i));
    return out;
  }
  const std::size_t k = std::get<FixedKPrior>(prior).k;
  require(k <= n, "fixed-k prior: k must not exceed n");
  std::vector<ItemIndex> all(n);
  std::iota(all.begin(), all.end(), ItemIndex{0});
  out.reserve(k);
  // Selection sampling keeps the output sorted.
  std::sample(all.begin(), all.end(), std::back_inserter(out), k, rng);
  return out;
}

TrialResult run_trial(const SchemeConfig& config, const DefectivePrior& prior, std::size_t n,
                      Mode mode, std::uint64_t seed) {
  const ItemSet defectives = sample_defectives(prior, n, derive_seed(seed, kDefectiveStream));
  TrialResult out;
  out.defectives = defectives.size();
  if (std::holds_alternative<scheme::Individual>(config)) {
    validate(config, n);
    out.t2 = n;
  } else {
    const PoolingDesign design = generate_design(config, n, derive_seed(seed, kDesignStream));
    out.t1 = design.t1();
    out.t2 = stage2_count(design, run_tests(design, defectives), mode);
  }
  out.total = out.t1 + out.t2;
  return out;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index) {
  return derive_seed(master_seed, index);
}

std::size_t empirical_quantile(std::vector<std::size_t> values, double q) {
  require(!values.empty(), "empirical_quantile: no values");
  require(q > 0.0 && q <= 1.0, "empirical_quantile: q must lie in (0, 1]");
  const auto m = static_cast<double>(values.size());
  // Nudge down before ceil so q*M that is integral in exact arithmetic stays put.
  auto rank = static_cast<std::size_t>(std::ceil(q * m - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   values.end());
  return values[rank - 1];
}

TrialStatistics summarize_trials(std::span<const TrialResult> trials) {
  require(!trials.empty(), "summarize_trials: no trials");
  std::vector<std::size_t> totals;
  totals.reserve(trials.size());
  std::uint64_t sum = 0;
  for (const auto& t : trials) {
    totals.push_back(t.total);
    sum += t.total;
  }
  TrialStatistics out;
  out.mean_total = static_cast<double>(sum) / static_cast<double>(trials.size());
  out.decile10 = empirical_quantile(totals, 0.1);
  out.decile90 = empirical_quantile(std::move(totals), 0.9);
  return out;
}

Experiment run_experiment(const SchemeConfig& config, const DefectivePrior& prior, std::size_t n,
                          Mode mode, std::size_t trials, std::uint64_t master_seed,
                          unsigned threads) {
  require(trials >= 1, "run_experiment: need at least one trial");
  validate(config, n);
  if (const auto* fk = std::get_if<FixedKPrior>(&prior))
    require(fk->k <= n, "fixed-k prior: k must not exceed n");

  Experiment out;
  out.trials.resize(trials);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto worker = [&] {
    try {
      for (std::size_t i = next++; i < trials; i = next++)
        out.trials[i] = run_trial(config, prior, n, mode, trial_seed(master_seed, i));
    } catch (...) {
      const std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = trials;
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  const auto stats = summarize_trials(out.trials);
  auto& s = out.summary;
  s.scheme = config;
  s.prior = prior;
  s.mode = mode;
  s.n = n;
  s.trials = trials;
  s.t1 = stage_one_tests(config, n);
  s.mean_total = stats.mean_total;
  s.decile10 = stats.decile10;
  s.decile90 = stats.decile90;
  s.theory_et_per_item = theory_et(config, n, prevalence(prior, n));
  s.theory = static_cast<double>(n) * s.theory_et_per_item;
  s.seed = master_seed;
  return out;
}

std::vector<Experiment> table1_preset(std::uint64_t master_seed, std::size_t trials,
                                      unsigned threads) {
  constexpr double p = 0.027;
  const DefectivePrior prior = IidPrior{p};
  struct Row {
    SchemeConfig config;
    std::size_t n;
  };
  const Row rows[] = {
      {scheme::Individual{}, 1000},
      {scheme::Dorfman{7}, 1001},
      {scheme::Bernoulli{1.0 / (p * 1000.0), 190}, 1000},
      {scheme::ConstantTestsPerItem{4, 160}, 1000},
      {scheme::DoublyConstant{4, 25}, 1000},
  };
  std::vector<Experiment> out;
  for (const auto& row : rows)
    out.push_back(run_experiment(row.config, prior, row.n, Mode::conservative, trials,
                                 master_seed, threads));
  return out;
}

double exact_dc_fixed_k_et2(std::size_t n, std::size_t k, std::size_t r, std::size_t s) {
  require(r >= 1 && s >= 1, "exact_dc_fixed_k_et2: r and s must be positive");
  require(s <= n && n % s == 0, "exact_dc_fixed_k_et2: s must divide n");
  require(k <= n, "exact_dc_fixed_k_et2: k must not exceed n");
  if (k == n) return static_cast<double>(n);
  // P(test of a fixed nondefective is negative) = C(n-k-1, s-1) / C(n-1, s-1)
  //   = prod_{j<s-1} (n-k-1-j) / (n-1-j).
  double negative = 1.0;
  for (std::size_t j = 0; j + 1 < s; ++j) {
    if (j >= n - k - 1) {
      negative = 0.0;
      break;
    }
    negative *= static_cast<double>(n - k - 1 - j) / static_cast<double>(n - 1 - j);
  }
  const double hidden = std::pow(1.0 - negative, static_cast<double>(r));
  return static_cast<double>(k) + static_cast<double>(n - k) * hidden;
}

}  // namespace twostage
