#include "twostage/bounds.hpp"

#include "twostage/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace twostage {

namespace {

void require_prevalence(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("prevalence must lie in (0, 1)");
}

// max over w in [2, w_max] of -w ln(1 - q^{w - shift}).
WeightMaximum maximize_over_weight(double p, std::size_t w_max, int shift) {
  require_prevalence(p);
  const double log_q = std::log1p(-p);
  WeightMaximum best{-1.0, 2};
  for (std::size_t w = 2; w <= w_max; ++w) {
    const double wd = static_cast<double>(w);
    const double q_pow = std::exp((wd - shift) * log_q);
    const double value = -wd * std::log1p(-q_pow);
    if (value > best.value) best = {value, w};
  }
  return best;
}

// min over T1 >= 0 of T1 + c exp(-rate T1): interior optimum is (1/rate)(ln(c rate) + 1)
// when c rate > 1, otherwise T1 = 0 gives c.
double clamped_optimum(double c, double rate) {
  if (c * rate <= 1.0) return c;
  return (std::log(c * rate) + 1.0) / rate;
}

}  // namespace

std::size_t weight_scan_limit(double p) {
  require_prevalence(p);
  return static_cast<std::size_t>(std::ceil(6.0 * std::log(2.0) / -std::log1p(-p))) + 4;
}

WeightMaximum f_of_p(double p, std::size_t w_max) { return maximize_over_weight(p, w_max, 1); }
WeightMaximum g_of_p(double p, std::size_t w_max) { return maximize_over_weight(p, w_max, 0); }
WeightMaximum f_of_p(double p) { return f_of_p(p, weight_scan_limit(p)); }
WeightMaximum g_of_p(double p) { return g_of_p(p, weight_scan_limit(p)); }

TwoStageBound two_stage_lower_bound(double p) {
  const double f = f_of_p(p).value;
  if (f <= 1.0) return {1.0, 0.0};
  return {(std::log(f) + 1.0) / f, std::log(f) / f};
}

std::string_view binding_name(BindingBound b) {
  switch (b) {
    case BindingBound::counting: return "counting";
    case BindingBound::ungar: return "ungar";
    case BindingBound::bound2: return "bound2";
    case BindingBound::bound3: return "bound3";
  }
  return "unknown";
}

double ungar_threshold() { return (3.0 - std::sqrt(5.0)) / 2.0; }

BoundReport conservative_lower_bound(double p) {
  require_prevalence(p);
  BoundReport out;
  out.p = p;
  out.counting = entropy(p);
  out.thm1_two_stage = two_stage_lower_bound(p).et;
  out.f = f_of_p(p);
  out.g = g_of_p(p);
  if (p >= ungar_threshold()) out.bound1 = 1.0;
  out.bound2 = clamped_optimum(1.0, out.g.value);
  out.bound3 = p + clamped_optimum(1.0 - p, out.f.value);

  out.best = out.counting;
  out.binding = BindingBound::counting;
  const auto take = [&out](double value, BindingBound which) {
    if (value > out.best) {
      out.best = value;
      out.binding = which;
    }
  };
  // Earlier entries win ties.
  if (out.bound1) take(*out.bound1, BindingBound::ungar);
  take(out.bound3, BindingBound::bound3);
  take(out.bound2, BindingBound::bound2);
  // At p = 1/2 counting also equals 1; report Ungar.
  if (out.bound1 && *out.bound1 >= out.best) out.binding = BindingBound::ungar;
  out.rate_ceiling = out.counting / out.best;
  return out;
}

double bound_crossover(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("bound_crossover: need lo < hi");
  const auto gap = [](double p) {
    const auto r = conservative_lower_bound(p);
    return r.bound2 - r.bound3;
  };
  double g_lo = gap(lo);
  const double g_hi = gap(hi);
  // Both bounds clamp to 1 at high p, so a zero endpoint is a touch, not a crossing.
  if (!(g_lo < 0.0 && g_hi > 0.0) && !(g_lo > 0.0 && g_hi < 0.0))
    throw std::invalid_argument("bound_crossover: bound2 - bound3 does not change sign on bracket");
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = gap(mid);
    if (g_mid == 0.0) return mid;
    if ((g_mid > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace twostage
