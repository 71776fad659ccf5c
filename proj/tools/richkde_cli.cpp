#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "richkde/error_analysis.hpp"
#include "richkde/errors.hpp"
#include "richkde/extrapolation.hpp"
#include "richkde/io.hpp"
#include "richkde/kernel.hpp"
#include "richkde/selection.hpp"

namespace {

namespace io = richkde::io;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitInputFormat = 2;
constexpr int kExitNumericalConfig = 3;
constexpr int kExitIo = 4;

struct EvalOptions {
  std::string input;
  bool header = false;
  std::string grid;
  double h = 0.0;
  std::string bandwidths;
  int r = 0;
  double ratio = 1.2;
  bool clamp = false;
  std::string output;
};

struct WeightsOptions {
  std::string bandwidths;
  long long n = 0;
  int d = 1;
  int r = 0;
  double ratio = 1.2;
};

struct BenchmarkOptions {
  int d = 1;
  int r = 1;
  std::string n_list = "250,500,1000,2000,4000,8000";
  int trials = 200;
  std::uint64_t seed = 42;
  double ratio = 1.2;
  std::string grid;
  std::string dist = "normal";
  std::string output;
};

struct SweepOptions {
  std::string mode = "richardson";
  int d = 1;
  long long n = 1000;
  std::string h1_list;
  std::string h2_list;
  int trials = 200;
  std::uint64_t seed = 42;
  std::string grid;
  std::string dist = "normal";
  std::string output;
};

richkde::EvaluationGrid default_or_parsed_grid(const std::string& spec, int d) {
  if (!spec.empty()) return io::parse_grid_spec(spec);
  if (d == 1) return io::parse_grid_spec("-2:0.5:2");
  throw std::invalid_argument("--grid is required for d > 1");
}

// Writes through a file when a path is given, stdout otherwise.
void with_output_stream(const std::string& path,
                        const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) {
    writer(std::cout);
    std::cout.flush();
    if (!std::cout) throw io::IoError("write failure on stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::IoError("cannot open output file " + path);
  writer(out);
  out.flush();
  if (!out) throw io::IoError("write failure on " + path);
}

// Presentation-only: negative densities to 0, then rescale so the grid
// total matches the raw signed total. Never used in error analysis.
Eigen::VectorXd clamp_renormalize(const Eigen::VectorXd& values) {
  Eigen::VectorXd clamped = values.cwiseMax(0.0);
  const double raw_total = values.sum();
  const double clamped_total = clamped.sum();
  if (clamped_total > 0.0 && raw_total > 0.0)
    clamped *= raw_total / clamped_total;
  return clamped;
}

int cmd_eval(const EvalOptions& options, bool have_h, bool have_bandwidths, bool have_r) {
  std::ifstream in(options.input, std::ios::binary);
  if (!in) throw io::IoError("cannot open input file " + options.input);
  const Eigen::MatrixXd data = io::read_csv_matrix(in, options.header);
  const richkde::Sample sample(data);

  const richkde::EvaluationGrid grid = io::parse_grid_spec(options.grid);
  if (grid.dim() != sample.dim())
    throw std::invalid_argument("grid dimension does not match input data");

  std::vector<double> h_values;
  if (have_h) {
    h_values = {options.h};
  } else if (have_bandwidths) {
    h_values = io::parse_double_list(options.bandwidths);
  } else if (have_r) {
    const double h_star = richkde::optimal_bandwidth(
        sample.size(), static_cast<int>(sample.dim()), options.r);
    h_values = richkde::spread_bandwidths(h_star, options.r, options.ratio).values();
  } else {
    throw io::InputFormatError("eval: pass exactly one of --h, --bandwidths, --r");
  }
  const richkde::BandwidthSet bandwidths(h_values);
  const richkde::WeightVector weights = richkde::lagrange_weights(bandwidths);
  const richkde::ExtrapolatedEstimator estimator(sample, bandwidths, weights);

  Eigen::VectorXd density = richkde::extrapolated_evaluate_grid(estimator, grid);
  if (options.clamp) density = clamp_renormalize(density);

  Eigen::MatrixXd table(grid.size(), grid.dim() + 1);
  table.leftCols(grid.dim()) = grid.points();
  table.col(grid.dim()) = density;
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < grid.dim(); ++j)
    names.push_back("x_" + std::to_string(j + 1));
  names.push_back("density");

  with_output_stream(options.output,
                     [&](std::ostream& out) { io::write_csv_matrix(out, table, names); });
  return 0;
}

int cmd_weights(const WeightsOptions& options, bool have_bandwidths) {
  std::vector<double> h_values;
  if (have_bandwidths) {
    h_values = io::parse_double_list(options.bandwidths);
  } else if (options.n > 0 && options.r > 0) {
    const double h_star = richkde::optimal_bandwidth(options.n, options.d, options.r);
    h_values = richkde::spread_bandwidths(h_star, options.r, options.ratio).values();
  } else {
    throw io::InputFormatError("weights: pass --bandwidths or both --n and --r");
  }
  const richkde::BandwidthSet bandwidths(h_values);
  const richkde::WeightVector weights = richkde::lagrange_weights(bandwidths);
  const Eigen::VectorXd residual = richkde::constraint_residual(bandwidths, weights);

  double max_abs = 0.0;
  for (double w : weights.values()) max_abs = std::max(max_abs, std::abs(w));

  std::ostream& out = std::cout;
  out << "bandwidths:";
  for (double h : bandwidths.values()) out << ' ' << io::format_double(h);
  out << "\nweights:";
  for (double w : weights.values()) out << ' ' << io::format_double(w);
  out << "\nresiduals:";
  for (Eigen::Index i = 0; i < residual.size(); ++i)
    out << ' ' << io::format_double(residual[i]);
  out << "\nmax_abs_weight: " << io::format_double(max_abs) << '\n';
  if (!out) throw io::IoError("write failure on stdout");
  return 0;
}

int cmd_benchmark(const BenchmarkOptions& options) {
  const richkde::ReferenceDistribution dist =
      io::parse_distribution_spec(options.dist, options.d);
  const richkde::EvaluationGrid grid = default_or_parsed_grid(options.grid, options.d);
  const std::vector<long long> n_list = io::parse_long_list(options.n_list);

  const richkde::ConvergenceResult result = richkde::convergence_sweep(
      dist, options.d, options.r, n_list, options.trials, grid, options.seed,
      options.ratio);

  ordered_json report;
  report["config"] = {{"command", "benchmark"},
                      {"d", options.d},
                      {"r", options.r},
                      {"n_list", n_list},
                      {"trials", options.trials},
                      {"seed", options.seed},
                      {"ratio", options.ratio},
                      {"grid", options.grid.empty() ? "-2:0.5:2" : options.grid},
                      {"dist", options.dist}};
  report["table"] = ordered_json::array();
  for (const auto& row : result.table)
    report["table"].push_back({{"n", row.n},
                               {"h_star", row.h_star},
                               {"mse", row.mse},
                               {"stderr", row.mc_standard_error}});
  report["slope"] = result.slope;
  report["intercept"] = result.intercept;

  with_output_stream(options.output,
                     [&](std::ostream& out) { out << report.dump(2) << '\n'; });
  return 0;
}

int cmd_sweep(const SweepOptions& options) {
  const richkde::ReferenceDistribution dist =
      io::parse_distribution_spec(options.dist, options.d);
  const richkde::EvaluationGrid grid = default_or_parsed_grid(options.grid, options.d);
  const std::vector<double> h1_list = io::parse_double_list(options.h1_list);
  const std::vector<double> h2_list = io::parse_double_list(options.h2_list);
  const richkde::SweepMode mode = options.mode == "richardson"
                                      ? richkde::SweepMode::richardson
                                      : richkde::SweepMode::constrained;

  const richkde::PairSweepResult result = richkde::h_pair_sweep(
      dist, options.d, options.n, h1_list, h2_list, options.trials, grid,
      options.seed, mode);

  with_output_stream(options.output, [&](std::ostream& out) {
    out << "h1,h2,mse\n";
    for (const auto& cell : result.cells) {
      out << io::format_double(cell.h1) << ',' << io::format_double(cell.h2) << ',';
      if (!cell.missing) out << io::format_double(cell.mse);
      out << '\n';
    }
    if (!out) throw io::IoError("write failure while emitting sweep CSV");
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Richardson-extrapolated kernel density estimation"};
  app.require_subcommand(1);
  // --h is a real option below, so help keeps only its long form
  app.set_help_flag("--help", "Print help and exit");

  EvalOptions eval_options;
  auto* eval = app.add_subcommand(
      "eval", "Evaluate an extrapolated density estimate over a grid");
  eval->set_help_flag("--help", "Print help and exit");
  eval->add_option("--input", eval_options.input, "CSV of observations, one row each")
      ->required();
  eval->add_flag("--header", eval_options.header, "Skip a header row in the input");
  eval->add_option("--grid", eval_options.grid,
                   "Evaluation grid, start:step:stop per dimension, comma-joined "
                   "(step 0 = single point)")
      ->required();
  auto* eval_h = eval->add_option("--h", eval_options.h, "Single bandwidth");
  auto* eval_bw = eval->add_option("--bandwidths", eval_options.bandwidths,
                                   "Comma-separated bandwidths or lin:lo:hi:count");
  auto* eval_r = eval->add_option(
      "--r", eval_options.r, "Extrapolation order; bandwidths spread around h*(n,d,r)");
  eval_h->excludes(eval_bw)->excludes(eval_r);
  eval_bw->excludes(eval_r);
  eval->add_option("--ratio", eval_options.ratio,
                   "Geometric spacing ratio used with --r (default 1.2)");
  eval->add_flag("--clamp", eval_options.clamp,
                 "Presentation-only: clamp negative densities to 0 and renormalize");
  eval->add_option("--output", eval_options.output, "Output CSV path (default stdout)");

  WeightsOptions weights_options;
  auto* weights = app.add_subcommand(
      "weights", "Print extrapolation weights and constraint residuals");
  weights->set_help_flag("--help", "Print help and exit");
  auto* weights_bw = weights->add_option("--bandwidths", weights_options.bandwidths,
                                         "Comma-separated bandwidths or lin:lo:hi:count");
  auto* weights_n = weights->add_option("--n", weights_options.n, "Sample size for h*");
  weights->add_option("--d", weights_options.d, "Dimension (default 1)");
  auto* weights_r = weights->add_option("--r", weights_options.r, "Extrapolation order");
  weights->add_option("--ratio", weights_options.ratio,
                      "Geometric spacing ratio (default 1.2)");
  weights_bw->excludes(weights_n)->excludes(weights_r);

  BenchmarkOptions benchmark_options;
  auto* benchmark = app.add_subcommand(
      "benchmark", "Measure MSE convergence over sample sizes and fit the rate");
  benchmark->set_help_flag("--help", "Print help and exit");
  benchmark->add_option("--d", benchmark_options.d, "Dimension (default 1)");
  benchmark->add_option("--r", benchmark_options.r, "Extrapolation order (default 1)");
  benchmark->add_option("--n-list", benchmark_options.n_list,
                        "Comma-separated sample sizes (default 250..8000 doubling)");
  benchmark->add_option("--trials", benchmark_options.trials,
                        "Monte Carlo trials per sample size (default 200)");
  benchmark->add_option("--seed", benchmark_options.seed, "Base seed (default 42)");
  benchmark->add_option("--ratio", benchmark_options.ratio,
                        "Geometric spacing ratio (default 1.2)");
  benchmark->add_option("--grid", benchmark_options.grid,
                        "Evaluation grid (default -2:0.5:2 for d=1)");
  benchmark->add_option("--dist", benchmark_options.dist,
                        "normal | mixture:w,m1..md,s;... (default normal)");
  benchmark->add_option("--output", benchmark_options.output,
                        "Report path (default stdout)");

  SweepOptions sweep_options;
  auto* sweep = app.add_subcommand(
      "sweep", "MSE over a grid of bandwidth pairs, heat-map ready");
  sweep->set_help_flag("--help", "Print help and exit");
  sweep->add_option("--mode", sweep_options.mode, "richardson | constrained")
      ->check(CLI::IsMember({"richardson", "constrained"}));
  sweep->add_option("--d", sweep_options.d, "Dimension (default 1)");
  sweep->add_option("--n", sweep_options.n, "Sample size (default 1000)");
  sweep->add_option("--h1-list", sweep_options.h1_list,
                    "First-axis bandwidths: comma list or lin:lo:hi:count")
      ->required();
  sweep->add_option("--h2-list", sweep_options.h2_list,
                    "Second-axis bandwidths: comma list or lin:lo:hi:count")
      ->required();
  sweep->add_option("--trials", sweep_options.trials,
                    "Monte Carlo trials per cell (default 200)");
  sweep->add_option("--seed", sweep_options.seed,
                    "Seed shared by all cells (default 42)");
  sweep->add_option("--grid", sweep_options.grid,
                    "Evaluation grid (default -2:0.5:2 for d=1)");
  sweep->add_option("--dist", sweep_options.dist,
                    "normal | mixture:w,m1..md,s;... (default normal)");
  sweep->add_option("--output", sweep_options.output, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputFormat;
  }

  try {
    if (eval->parsed())
      return cmd_eval(eval_options, eval_h->count() > 0, eval_bw->count() > 0,
                      eval_r->count() > 0);
    if (weights->parsed()) return cmd_weights(weights_options, weights_bw->count() > 0);
    if (benchmark->parsed()) return cmd_benchmark(benchmark_options);
    if (sweep->parsed()) return cmd_sweep(sweep_options);
  } catch (const io::InputFormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInputFormat;
  } catch (const io::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const richkde::NumericalFailure& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumericalConfig;
  } catch (const std::overflow_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumericalConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitNumericalConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitNumericalConfig;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
