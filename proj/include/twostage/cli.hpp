#pragma once

// Command-line front end. Every number printed is a direct library result
// formatted with format_number; the CLI does no arithmetic of its own.
//
//   twostage theory   --scheme dc --r 4 --s 25 --p 0.027
//   twostage optimize --family dc --p-min 0.001 --p-max 0.5 --steps 200 --log
//   twostage bounds   --p 0.027
//   twostage simulate --table1 --seed 1 --trials 1000 --out results/
//   twostage simulate --config run.json --out results/
//   twostage figure-data --out figures/

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace twostage {

struct SweepSpec {
  double p_min = 1e-3;
  double p_max = 0.5;
  std::size_t steps = 200;
  bool log_spaced = true;
};

// Ascending grid of prevalences. Throws std::invalid_argument unless
// 0 < p_min <= p_max < 1 and steps >= 1.
std::vector<double> sweep_grid(const SweepSpec& spec);

// Writes aspect_ratio.csv, rate.csv and rate_zoom.csv into dir.
void write_figure_data(const std::filesystem::path& dir, std::span<const double> grid,
                       std::span<const double> zoom_grid);

// Default zoom grid: 0.010, 0.011, ..., 0.250.
std::vector<double> default_zoom_grid();

// Arguments exclude the program name. Returns the process exit code.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace twostage
