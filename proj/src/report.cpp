#include "twostage/report.hpp"

#include <cstdio>
#include <ostream>

namespace twostage {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_trials_csv(std::span<const Experiment> experiments, std::ostream& out) {
  out << "scheme,trial,defectives,t1,t2,total\n";
  for (const auto& e : experiments) {
    const auto name = family_name(e.summary.scheme);
    for (std::size_t i = 0; i < e.trials.size(); ++i) {
      const auto& t = e.trials[i];
      out << name << ',' << i << ',' << t.defectives << ',' << t.t1 << ',' << t.t2 << ','
          << t.total << '\n';
    }
  }
}

void write_summary_csv(std::span<const Experiment> experiments, std::ostream& out) {
  out << "scheme,n,p,trials,t1,mean,decile10,decile90,theory\n";
  for (const auto& e : experiments) {
    const auto& s = e.summary;
    out << family_name(s.scheme) << ',' << s.n << ',' << format_number(prevalence(s.prior, s.n))
        << ',' << s.trials << ',' << s.t1 << ',' << format_number(s.mean_total) << ','
        << s.decile10 << ',' << s.decile90 << ',' << format_number(s.theory) << '\n';
  }
}

void write_bounds_header(std::ostream& out) {
  out << "p,counting,thm1,bound1,bound2,bound3,best,binding,rate_ceiling\n";
}

void write_bounds_row(const BoundReport& r, std::ostream& out) {
  out << format_number(r.p) << ',' << format_number(r.counting) << ','
      << format_number(r.thm1_two_stage) << ','
      << (r.bound1 ? format_number(*r.bound1) : std::string("inactive")) << ','
      << format_number(r.bound2) << ',' << format_number(r.bound3) << ','
      << format_number(r.best) << ',' << binding_name(r.binding) << ','
      << format_number(r.rate_ceiling) << '\n';
}

}  // namespace twostage
