#include "twostage/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

namespace twostage {

namespace {

constexpr double kTieTolerance = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_prevalence(double p) {
  require(p > 0.0 && p < 1.0, "prevalence must lie in (0, 1)");
}

struct Candidate {
  std::optional<FirstStage> stage;
  double et = 1.0;

  double t1_frac() const { return stage ? stage->t1_frac : 0.0; }
};

// Keeps the cheaper candidate; on a tie, the one with fewer stage-one tests.
void consider(Candidate& best, const FirstStage& stage, double et) {
  const bool better = et < best.et - kTieTolerance;
  const bool tie = std::abs(et - best.et) <= kTieTolerance;
  if (better || (tie && stage.t1_frac < best.t1_frac())) best = {stage, et};
}

}  // namespace

double entropy(double p) {
  require(p >= 0.0 && p <= 1.0, "entropy: p must lie in [0, 1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double rate(double p, double et_per_item) {
  require(et_per_item > 0.0, "rate: expected tests must be positive");
  return entropy(p) / et_per_item;
}

double dorfman_et(std::size_t s, double p) {
  require(s >= 1, "dorfman_et: s must be at least 1");
  require(p >= 0.0 && p <= 1.0, "dorfman_et: p must lie in [0, 1]");
  return 1.0 / static_cast<double>(s) + 1.0 - std::pow(1.0 - p, static_cast<double>(s));
}

double bernoulli_et(double t1_frac, double sigma, double p) {
  require(t1_frac >= 0.0, "bernoulli_et: t1_frac must be non-negative");
  require(sigma > 0.0, "bernoulli_et: sigma must be positive");
  require(p >= 0.0 && p <= 1.0, "bernoulli_et: p must lie in [0, 1]");
  return t1_frac + p + (1.0 - p) * std::exp(-sigma * std::exp(-sigma * p) * t1_frac);
}

BernoulliOptimum bernoulli_optimum(double p) {
  require_prevalence(p);
  constexpr double e = std::numbers::e;
  BernoulliOptimum out;
  out.sigma = 1.0 / p;
  if (p >= 1.0 / (e + 1.0)) return out;
  out.t1_frac = e * p * std::log((1.0 - p) / (e * p));
  out.et = p * (e * std::log((1.0 - p) / p) + 1.0);
  return out;
}

double ctpi_et(std::size_t r, double sigma, double p) {
  require(r >= 1, "ctpi_et: r must be at least 1");
  require(sigma > 0.0, "ctpi_et: sigma must be positive");
  require(p >= 0.0 && p <= 1.0, "ctpi_et: p must lie in [0, 1]");
  const double all_positive = std::pow(-std::expm1(-p * sigma), static_cast<double>(r));
  return static_cast<double>(r) / sigma + p + (1.0 - p) * all_positive;
}

double dc_et(std::size_t r, std::size_t s, double p) {
  require(r >= 1, "dc_et: r must be at least 1");
  require(s >= 1, "dc_et: s must be at least 1");
  require(p >= 0.0 && p <= 1.0, "dc_et: p must lie in [0, 1]");
  const double q = 1.0 - p;
  const double hidden = std::pow(1.0 - std::pow(q, static_cast<double>(s - 1)), static_cast<double>(r));
  return static_cast<double>(r) / static_cast<double>(s) + p + q * hidden;
}

double mutesa_asymptotic_et(double p) {
  require_prevalence(p);
  return std::numbers::e * p * std::log(1.0 / p);
}

double mutesa_asymptotic_rate() { return 1.0 / (std::numbers::e * std::numbers::ln2); }

double theory_et(const SchemeConfig& config, std::size_t n, double p) {
  validate(config, n);
  const double nd = static_cast<double>(n);
  if (const auto* d = std::get_if<scheme::Dorfman>(&config)) return dorfman_et(d->s, p);
  if (const auto* b = std::get_if<scheme::Bernoulli>(&config)) {
    if (b->t1 == 0 || b->pi == 0.0) return 1.0;
    return bernoulli_et(static_cast<double>(b->t1) / nd, b->pi * nd, p);
  }
  if (const auto* c = std::get_if<scheme::ConstantTestsPerItem>(&config))
    return ctpi_et(c->r, c->sigma(n), p);
  if (const auto* d = std::get_if<scheme::DoublyConstant>(&config)) return dc_et(d->r, d->s, p);
  if (const auto* h = std::get_if<scheme::Hypercube>(&config))
    return dc_et(h->r2, n / h->a, p);
  return 1.0;
}

OptimizedScheme optimize_scheme(Family family, double p, const SearchLimits& limits) {
  require_prevalence(p);
  const std::size_t s_max =
      limits.s_max != 0 ? limits.s_max : static_cast<std::size_t>(std::ceil(8.0 / p));
  const double sigma_max = limits.sigma_max > 0.0 ? limits.sigma_max : 8.0 / p;

  Candidate best;
  switch (family) {
    case Family::dorfman: {
      require(s_max >= 1, "optimize_scheme: empty pool-size range");
      for (std::size_t s = 1; s <= s_max; ++s) {
        const double sd = static_cast<double>(s);
        consider(best, FirstStage{1, s, sd, 1.0 / sd}, dorfman_et(s, p));
      }
      break;
    }
    case Family::bernoulli: {
      const auto opt = bernoulli_optimum(p);
      if (opt.t1_frac > 0.0) consider(best, FirstStage{0, 0, opt.sigma, opt.t1_frac}, opt.et);
      break;
    }
    case Family::ctpi: {
      require(limits.r_max >= 1, "optimize_scheme: empty r range");
      const double sigma_min = sigma_max * 1e-9;
      for (std::size_t r = 1; r <= limits.r_max; ++r) {
        const auto et_of = [r, p](double sigma) { return ctpi_et(r, sigma, p); };
        // Not unimodal in sigma (a local peak can sit between the interior
        // minimum and the far end), so bracket with a log-spaced scan first.
        constexpr int kScan = 400;
        const double ratio = std::pow(sigma_max / sigma_min, 1.0 / kScan);
        int best_i = 0;
        double best_et = et_of(sigma_min);
        for (int i = 1; i <= kScan; ++i) {
          const double v = et_of(sigma_min * std::pow(ratio, i));
          if (v < best_et) {
            best_et = v;
            best_i = i;
          }
        }
        const double lo = sigma_min * std::pow(ratio, std::max(best_i - 1, 0));
        const double hi = best_i == kScan ? sigma_max : sigma_min * std::pow(ratio, best_i + 1);
        double sigma = golden_section_minimize(et_of, lo, hi);
        if (et_of(sigma_max) < et_of(sigma)) sigma = sigma_max;
        consider(best, FirstStage{r, 0, sigma, static_cast<double>(r) / sigma}, et_of(sigma));
      }
      break;
    }
    case Family::doubly_constant: {
      require(limits.r_max >= 1, "optimize_scheme: empty r range");
      require(s_max >= 2, "optimize_scheme: empty pool-size range");
      for (std::size_t r = 1; r <= limits.r_max; ++r) {
        for (std::size_t s = 2; s <= s_max; ++s) {
          const double rd = static_cast<double>(r);
          const double sd = static_cast<double>(s);
          consider(best, FirstStage{r, s, sd, rd / sd}, dc_et(r, s, p));
        }
      }
      break;
    }
    default:
      throw std::invalid_argument("optimize_scheme: unsupported family " +
                                  std::string(family_name(family)));
  }

  OptimizedScheme out;
  out.family = family;
  out.first_stage = best.stage;
  out.et = best.et;
  out.rate = rate(p, best.et);
  return out;
}

}  // namespace twostage
