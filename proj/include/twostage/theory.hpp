#pragma once

// Large-n expected-test formulas for conservative two-stage schemes.
//
// Everything here is per item: expected total tests divided by n (the aspect
// ratio). Multiply by n for an expected test count.

#include "twostage/design.hpp"

#include <cmath>
#include <cstddef>
#include <optional>

namespace twostage {

// Binary entropy in bits, with 0 log 0 = 0.
double entropy(double p);

// Bits learned per test: entropy(p) / et_per_item.
double rate(double p, double et_per_item);

// 1/s + 1 - (1-p)^s
double dorfman_et(std::size_t s, double p);

// t1_frac + p + (1-p) exp(-sigma e^{-sigma p} t1_frac), where t1_frac = T1/n
// and sigma = pi*n is the mean number of items per test.
double bernoulli_et(double t1_frac, double sigma, double p);

struct BernoulliOptimum {
  double sigma = 0.0;    // 1/p
  double t1_frac = 0.0;  // 0 when individual testing is better
  double et = 1.0;
};

// Closed-form optimum: sigma = 1/p and T1/n = e p ln((1-p)/(e p)), which is
// positive only for p < 1/(e+1).
BernoulliOptimum bernoulli_optimum(double p);

// r/sigma + p + (1-p)(1 - e^{-p sigma})^r
double ctpi_et(std::size_t r, double sigma, double p);

// r/s + p + q (1 - q^{s-1})^r with q = 1-p.
double dc_et(std::size_t r, std::size_t s, double p);

// e p ln(1/p), the large-n cost of the hypercube multi-stage scheme.
double mutesa_asymptotic_et(double p);
// Its limiting rate, 1/(e ln 2).
double mutesa_asymptotic_rate();

// Asymptotic per-item cost of a concrete scheme at prevalence p on n items.
// Hypercube schemes are treated as doubly constant with r = r2, s = a^{r2-1}.
double theory_et(const SchemeConfig& config, std::size_t n, double p);

// ---------------------------------------------------------------------------
// Optimization

struct SearchLimits {
  std::size_t r_max = 20;
  std::size_t s_max = 0;     // 0 selects ceil(8/p)
  double sigma_max = 0.0;    // 0 selects 8/p
};

struct FirstStage {
  std::size_t r = 0;     // tests per item (ctpi, dc); 1 for dorfman
  std::size_t s = 0;     // items per test (dorfman, dc)
  double sigma = 0.0;    // mean items per test
  double t1_frac = 0.0;  // stage-one tests per item
};

struct OptimizedScheme {
  Family family = Family::individual;
  std::optional<FirstStage> first_stage;  // empty: individual testing wins
  double et = 1.0;
  double rate = 0.0;
};

// Minimize the family's formula over its parameters, then compare with
// individual testing (et = 1). Ties within 1e-12 go to fewer stage-one tests.
// Supports dorfman, bernoulli, ctpi and doubly_constant.
OptimizedScheme optimize_scheme(Family family, double p, const SearchLimits& limits = {});

// Golden-section minimizer over [lo, hi] for a unimodal function.
template <class F>
double golden_section_minimize(F&& f, double lo, double hi, double tol = 1e-10) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol * (1.0 + std::abs(lo) + std::abs(hi))) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace twostage
