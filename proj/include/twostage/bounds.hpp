#pragma once

// Lower bounds on the expected number of tests (per item) for two-stage and
// conservative two-stage group testing.

#include <cstddef>
#include <optional>
#include <string_view>

namespace twostage {

struct WeightMaximum {
  double value = 0.0;
  std::size_t argmax_w = 2;
};

// Largest test weight scanned when maximizing over w for prevalence p:
// ceil(6 ln 2 / -ln(1-p)) + 4.
std::size_t weight_scan_limit(double p);

// max over integer w >= 2 of -w ln(1 - (1-p)^{w-1}).
WeightMaximum f_of_p(double p);
// max over integer w >= 2 of -w ln(1 - (1-p)^w).
WeightMaximum g_of_p(double p);

// Same maximizations over an explicit range [2, w_max].
WeightMaximum f_of_p(double p, std::size_t w_max);
WeightMaximum g_of_p(double p, std::size_t w_max);

struct TwoStageBound {
  double et = 1.0;       // per item
  double t1_frac = 0.0;  // optimizing T1/n, clamped at 0
};

// Non-conservative two-stage bound (1/f)(ln f + 1); 1 when f <= 1.
TwoStageBound two_stage_lower_bound(double p);

enum class BindingBound { counting, ungar, bound2, bound3 };
std::string_view binding_name(BindingBound b);

struct BoundReport {
  double p = 0.0;
  double counting = 0.0;          // H(p)
  double thm1_two_stage = 1.0;    // non-conservative bound, reported only
  std::optional<double> bound1;   // 1 when p >= (3 - sqrt 5)/2
  double bound2 = 1.0;
  double bound3 = 1.0;
  double best = 1.0;              // max of counting, bound1, bound2, bound3
  BindingBound binding = BindingBound::counting;
  double rate_ceiling = 0.0;      // H(p) / best
  WeightMaximum f;
  WeightMaximum g;
};

// (3 - sqrt 5)/2: individual testing is optimal at or above this prevalence.
double ungar_threshold();

BoundReport conservative_lower_bound(double p);

// Bisection (to 1e-6) for the prevalence where bound2 and bound3 cross.
// Throws std::invalid_argument unless bound2 - bound3 has strictly opposite signs
// at lo and hi.
double bound_crossover(double lo, double hi);

}  // namespace twostage
