#pragma once

// CSV output shared by the library and the command-line tool.

#include "twostage/bounds.hpp"
#include "twostage/simulate.hpp"
#include "twostage/theory.hpp"

#include <iosfwd>
#include <span>
#include <string>

namespace twostage {

// Six significant digits, %g style.
std::string format_number(double value);

// scheme,trial,defectives,t1,t2,total
void write_trials_csv(std::span<const Experiment> experiments, std::ostream& out);

// scheme,n,p,trials,t1,mean,decile10,decile90,theory
void write_summary_csv(std::span<const Experiment> experiments, std::ostream& out);

// p,counting,thm1,bound1,bound2,bound3,best,binding,rate_ceiling
void write_bounds_header(std::ostream& out);
void write_bounds_row(const BoundReport& report, std::ostream& out);

}  // namespace twostage
