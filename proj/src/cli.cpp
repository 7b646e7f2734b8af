#include "twostage/cli.hpp"

#include "twostage/bounds.hpp"
#include "twostage/report.hpp"
#include "twostage/simulate.hpp"
#include "twostage/theory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>

namespace twostage {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

// Output goes to --out when given, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return file;
}

std::string optional_field(std::size_t value) { return value == 0 ? "" : std::to_string(value); }
std::string optional_field(double value) { return value == 0.0 ? "" : format_number(value); }

// ---------------------------------------------------------------------------
// theory

struct TheoryArgs {
  std::string scheme;
  std::optional<std::size_t> r;
  std::optional<std::size_t> s;
  std::optional<double> sigma;
  std::optional<double> t1_frac;
};

template <class T>
T need(const std::optional<T>& value, const std::string& scheme, const char* flag) {
  if (!value) fail("scheme " + scheme + " requires " + flag);
  return *value;
}

void cmd_theory(const TheoryArgs& a, std::span<const double> grid, std::ostream& out) {
  out << "p,scheme,r,s,sigma,t1_frac,et_per_item,rate\n";
  for (double p : grid) {
    std::size_t r = 0;
    std::size_t s = 0;
    double sigma = 0.0;
    double t1_frac = 0.0;
    double et = 1.0;
    if (a.scheme == "individual") {
      et = 1.0;
    } else if (a.scheme == "dorfman") {
      s = need(a.s, a.scheme, "--s");
      et = dorfman_et(s, p);
    } else if (a.scheme == "bernoulli") {
      sigma = need(a.sigma, a.scheme, "--sigma");
      t1_frac = need(a.t1_frac, a.scheme, "--t1-frac");
      et = bernoulli_et(t1_frac, sigma, p);
    } else if (a.scheme == "ctpi") {
      r = need(a.r, a.scheme, "--r");
      sigma = need(a.sigma, a.scheme, "--sigma");
      et = ctpi_et(r, sigma, p);
    } else if (a.scheme == "dc") {
      r = need(a.r, a.scheme, "--r");
      s = need(a.s, a.scheme, "--s");
      et = dc_et(r, s, p);
    } else if (a.scheme == "mutesa") {
      et = mutesa_asymptotic_et(p);
    }
    out << format_number(p) << ',' << a.scheme << ',' << optional_field(r) << ','
        << optional_field(s) << ',' << optional_field(sigma) << ',' << optional_field(t1_frac)
        << ',' << format_number(et) << ',' << format_number(rate(p, et)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// optimize

Family parse_family(const std::string& name) {
  if (name == "dorfman") return Family::dorfman;
  if (name == "bernoulli") return Family::bernoulli;
  if (name == "ctpi") return Family::ctpi;
  if (name == "dc" || name == "doubly_constant") return Family::doubly_constant;
  fail("unknown family " + name);
}

void cmd_optimize(Family family, const SearchLimits& limits, std::span<const double> grid,
                  std::ostream& out) {
  out << "p,family,first_stage,r,s,sigma,t1_frac,et_per_item,rate\n";
  for (double p : grid) {
    const auto best = optimize_scheme(family, p, limits);
    const FirstStage stage = best.first_stage.value_or(FirstStage{});
    out << format_number(p) << ',' << family_name(family) << ','
        << (best.first_stage ? std::string(family_name(family)) : std::string("none")) << ','
        << optional_field(stage.r) << ',' << optional_field(stage.s) << ','
        << optional_field(stage.sigma) << ',' << optional_field(stage.t1_frac) << ','
        << format_number(best.et) << ',' << format_number(best.rate) << '\n';
  }
}

// ---------------------------------------------------------------------------
// bounds

void cmd_bounds(std::span<const double> grid, std::ostream& out) {
  write_bounds_header(out);
  for (double p : grid) write_bounds_row(conservative_lower_bound(p), out);
}

// ---------------------------------------------------------------------------
// simulate

struct RunConfig {
  SchemeConfig scheme;
  std::size_t n = 0;
  DefectivePrior prior;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  Mode mode = Mode::conservative;
};

RunConfig parse_run_config(const json& doc) {
  static const std::set<std::string> known = {"scheme", "n",  "p",  "k",  "trials", "seed", "mode",
                                              "s",      "r",  "t1", "pi", "sigma",  "a",    "r2"};
  if (!doc.is_object()) fail("config must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) fail("unknown config key \"" + key + "\"");

  const auto get_size = [&doc](const char* key) -> std::size_t {
    if (!doc.contains(key)) fail(std::string("config is missing \"") + key + "\"");
    return doc.at(key).get<std::size_t>();
  };

  RunConfig cfg;
  const auto name = doc.at("scheme").get<std::string>();
  if (name == "hypercube") {
    cfg.scheme = scheme::Hypercube{get_size("a"), get_size("r2")};
    std::size_t n = 1;
    for (std::size_t i = 0; i < get_size("r2"); ++i) n *= get_size("a");
    cfg.n = doc.contains("n") ? get_size("n") : n;
  } else {
    cfg.n = get_size("n");
  }
  if (name == "individual") {
    cfg.scheme = scheme::Individual{};
  } else if (name == "dorfman") {
    cfg.scheme = scheme::Dorfman{get_size("s")};
  } else if (name == "bernoulli") {
    double pi = 0.0;
    if (doc.contains("pi")) pi = doc.at("pi").get<double>();
    else if (doc.contains("sigma")) pi = doc.at("sigma").get<double>() / static_cast<double>(cfg.n);
    else fail("bernoulli config needs \"pi\" or \"sigma\"");
    cfg.scheme = scheme::Bernoulli{pi, get_size("t1")};
  } else if (name == "ctpi") {
    cfg.scheme = scheme::ConstantTestsPerItem{get_size("r"), get_size("t1")};
  } else if (name == "dc" || name == "doubly_constant") {
    cfg.scheme = scheme::DoublyConstant{get_size("r"), get_size("s")};
  } else if (name != "hypercube") {
    fail("unknown scheme \"" + name + "\"");
  }

  if (doc.contains("p") == doc.contains("k")) fail("config needs exactly one of \"p\" and \"k\"");
  if (doc.contains("p")) cfg.prior = IidPrior{doc.at("p").get<double>()};
  else cfg.prior = FixedKPrior{get_size("k")};

  if (doc.contains("trials")) cfg.trials = get_size("trials");
  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("mode")) {
    const auto mode = doc.at("mode").get<std::string>();
    if (mode == "conservative") cfg.mode = Mode::conservative;
    else if (mode == "nonconservative") cfg.mode = Mode::nonconservative;
    else fail("mode must be \"conservative\" or \"nonconservative\"");
  }
  return cfg;
}

void write_simulation(std::span<const Experiment> experiments, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto file = open_output(dir / "trials.csv");
    write_trials_csv(experiments, file);
  }
  auto file = open_output(dir / "summary.csv");
  write_summary_csv(experiments, file);
}

}  // namespace

std::vector<double> sweep_grid(const SweepSpec& spec) {
  if (!(spec.p_min > 0.0 && spec.p_min <= spec.p_max && spec.p_max < 1.0))
    fail("sweep needs 0 < p-min <= p-max < 1");
  if (spec.steps == 0) fail("sweep needs at least one step");
  std::vector<double> grid(spec.steps);
  if (spec.steps == 1) {
    grid[0] = spec.p_min;
    return grid;
  }
  const double span = static_cast<double>(spec.steps - 1);
  for (std::size_t i = 0; i < spec.steps; ++i) {
    const double t = static_cast<double>(i) / span;
    grid[i] = spec.log_spaced
                  ? std::exp(std::log(spec.p_min) + t * (std::log(spec.p_max) - std::log(spec.p_min)))
                  : spec.p_min + t * (spec.p_max - spec.p_min);
  }
  grid.back() = spec.p_max;
  return grid;
}

std::vector<double> default_zoom_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 240; ++i) grid.push_back((10 + i) / 1000.0);
  return grid;
}

void write_figure_data(const std::filesystem::path& dir, std::span<const double> grid,
                       std::span<const double> zoom_grid) {
  std::filesystem::create_directories(dir);
  auto aspect = open_output(dir / "aspect_ratio.csv");
  auto rates = open_output(dir / "rate.csv");
  const char* header = "p,individual,dorfman,bernoulli,ctpi,dc,counting,lower_bound\n";
  aspect << header;
  rates << header;
  constexpr Family families[] = {Family::dorfman, Family::bernoulli, Family::ctpi,
                                 Family::doubly_constant};
  for (double p : grid) {
    const auto bound = conservative_lower_bound(p);
    aspect << format_number(p) << ',' << format_number(1.0);
    rates << format_number(p) << ',' << format_number(rate(p, 1.0));
    for (Family f : families) {
      const auto best = optimize_scheme(f, p);
      aspect << ',' << format_number(best.et);
      rates << ',' << format_number(best.rate);
    }
    aspect << ',' << format_number(bound.counting) << ',' << format_number(bound.best) << '\n';
    rates << ',' << format_number(1.0) << ',' << format_number(bound.rate_ceiling) << '\n';
  }

  auto zoom = open_output(dir / "rate_zoom.csv");
  zoom << "p,dc,lower_bound\n";
  for (double p : zoom_grid) {
    zoom << format_number(p) << ',' << format_number(optimize_scheme(Family::doubly_constant, p).rate)
         << ',' << format_number(conservative_lower_bound(p).rate_ceiling) << '\n';
  }
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conservative two-stage group testing: theory, bounds and simulation", "twostage"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  std::string out_path;
  std::optional<double> single_p;
  SweepSpec sweep;
  bool log_flag = false;
  unsigned threads = 0;
  app.add_option("--seed", seed, "Master seed for simulations")->capture_default_str();
  app.add_option("--out", out_path, "Output file (theory/optimize/bounds) or directory");
  auto* p_opt = app.add_option("--p", single_p, "Single prevalence");
  auto* pmin_opt = app.add_option("--p-min", sweep.p_min, "Sweep lower end")->capture_default_str();
  auto* pmax_opt = app.add_option("--p-max", sweep.p_max, "Sweep upper end")->capture_default_str();
  auto* steps_opt = app.add_option("--steps", sweep.steps, "Sweep points")->capture_default_str();
  auto* log_opt = app.add_flag("--log", log_flag, "Log-spaced sweep (default when no sweep flags)");
  p_opt->excludes(pmin_opt)->excludes(pmax_opt)->excludes(steps_opt)->excludes(log_opt);
  app.add_option("--threads", threads, "Simulation threads (0 = all cores)");

  TheoryArgs theory_args;
  auto* theory = app.add_subcommand("theory", "Expected tests per item and rate of a scheme");
  theory->add_option("--scheme", theory_args.scheme, "Scheme family")
      ->required()
      ->check(CLI::IsMember({"individual", "dorfman", "bernoulli", "ctpi", "dc", "mutesa"}));
  theory->add_option("--r", theory_args.r, "Tests per item");
  theory->add_option("--s", theory_args.s, "Items per test");
  theory->add_option("--sigma", theory_args.sigma, "Mean items per test");
  theory->add_option("--t1-frac", theory_args.t1_frac, "Stage-one tests per item");

  std::string family;
  SearchLimits limits;
  auto* optimize = app.add_subcommand("optimize", "Optimal parameters of a scheme family");
  optimize->add_option("--family", family, "Scheme family")
      ->required()
      ->check(CLI::IsMember({"dorfman", "bernoulli", "ctpi", "dc"}));
  optimize->add_option("--r-max", limits.r_max, "Largest tests-per-item scanned")->capture_default_str();
  optimize->add_option("--s-max", limits.s_max, "Largest pool size scanned (0 = ceil(8/p))");

  auto* bounds = app.add_subcommand("bounds", "Lower bounds for conservative two-stage testing");

  bool table1 = false;
  std::string config_path;
  std::optional<std::size_t> trials;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation");
  auto* table1_opt = simulate->add_flag("--table1", table1, "Run the five p = 0.027 presets");
  auto* config_opt = simulate->add_option("--config", config_path, "JSON run configuration");
  table1_opt->excludes(config_opt);
  simulate->add_option("--trials", trials, "Trials per scheme (default 1000)");

  auto* figure = app.add_subcommand("figure-data", "Curve data for the aspect-ratio and rate plots");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const bool sweep_given = pmin_opt->count() + pmax_opt->count() + steps_opt->count() +
                                 log_opt->count() > 0;
    sweep.log_spaced = sweep_given ? log_flag : true;
    const auto grid = single_p ? std::vector<double>{*single_p} : sweep_grid(sweep);
    if (single_p && !(*single_p > 0.0 && *single_p < 1.0)) fail("--p must lie in (0, 1)");

    if (theory->parsed()) {
      Sink sink(out_path, out);
      cmd_theory(theory_args, grid, sink.get());
    } else if (optimize->parsed()) {
      Sink sink(out_path, out);
      cmd_optimize(parse_family(family), limits, grid, sink.get());
    } else if (bounds->parsed()) {
      Sink sink(out_path, out);
      cmd_bounds(grid, sink.get());
    } else if (simulate->parsed()) {
      if (trials && *trials == 0) fail("--trials must be at least 1");
      const std::filesystem::path dir = out_path.empty() ? "." : out_path;
      std::vector<Experiment> experiments;
      if (table1) {
        experiments = table1_preset(seed, trials.value_or(1000), threads);
      } else if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot read " + config_path);
        auto cfg = parse_run_config(json::parse(in));
        if (app.get_option("--seed")->count() == 0) seed = cfg.seed;
        if (trials) cfg.trials = *trials;
        experiments.push_back(
            run_experiment(cfg.scheme, cfg.prior, cfg.n, cfg.mode, cfg.trials, seed, threads));
      } else {
        fail("simulate needs --table1 or --config");
      }
      write_simulation(experiments, dir);
      write_summary_csv(experiments, out);
    } else if (figure->parsed()) {
      const std::filesystem::path dir = out_path.empty() ? "." : out_path;
      write_figure_data(dir, grid, default_zoom_grid());
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace twostage
