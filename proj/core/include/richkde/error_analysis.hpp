#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "richkde/extrapolation.hpp"
#include "richkde/reference.hpp"

namespace richkde {

struct PointStats {
  double mean_estimate = 0.0;
  double empirical_bias = 0.0;
  double empirical_variance = 0.0;
  double empirical_mse = 0.0;
  double mc_standard_error = 0.0;
};

// Per-point Monte Carlo error measurements plus the configuration that
// produced them. empirical_mse = empirical_variance + empirical_bias^2
// holds in sample form at every point (same draws on both sides).
// grid_mean_mse averages the per-point MSEs uniformly; its standard
// error comes from the per-trial grid-averaged squared errors, so it is
// exact under cross-point correlation.
struct MSEReport {
  EvaluationGrid eval_points;
  int trials = 0;
  std::vector<PointStats> points;
  double grid_mean_mse = 0.0;
  double grid_mean_se = 0.0;
  long long n = 0;
  int d = 0;
  int r = 0;
  std::vector<double> bandwidths;
  std::vector<double> weights;
  std::uint64_t seed = 0;
};

// Leading-order risk proxies: V_ii = 1/(n h_i^d),
// V_ij = sqrt(2)/(n (h_i^2 + h_j^2)^{d/2}), B_ij = h_i^2 h_j^2.
// Distribution-dependent prefactors are deliberately omitted.
struct RiskMatrices {
  Eigen::MatrixXd V;
  Eigen::MatrixXd B;
  long long n = 0;
  int d = 0;
};

// T trials, trial t drawn with stream seed derive_stream_seed(seed, t),
// estimator rebuilt per trial, grid evaluated, two-pass statistics in
// trial order (deterministic regardless of parallel execution).
MSEReport empirical_mse(const ReferenceDistribution& dist, long long n,
                        const BandwidthSet& bandwidths, const WeightVector& weights,
                        const EvaluationGrid& grid, int trials, std::uint64_t seed);

// Same measurement with caller-chosen per-trial seeds (testing hook;
// repeated seeds force identical draws).
MSEReport empirical_mse_with_seeds(const ReferenceDistribution& dist, long long n,
                                   const BandwidthSet& bandwidths,
                                   const WeightVector& weights,
                                   const EvaluationGrid& grid,
                                   std::span<const std::uint64_t> trial_seeds);

// Closed-form leading-order variance of the r=2 extrapolated estimator
// for density value p_at_x:
//   p/(n (2pi)^{d/2}) * (c1^2/h1^d + c2^2/h2^d
//                        + 2 sqrt(2) c1 c2/(h1^2+h2^2)^{d/2}).
// Kept exactly in this form (including its d=1 quirks) because the
// Monte Carlo comparison bands are calibrated against it as written.
double theoretical_variance_r2(double p_at_x, long long n, const BandwidthSet& h,
                               const WeightVector& c, int d);

RiskMatrices risk_matrices(const BandwidthSet& bandwidths, long long n, int d);

// c' M c
double quadratic_form(const WeightVector& c, const Eigen::MatrixXd& M);

// Ordinary least squares of ln(y) on ln(x); returns (slope, intercept).
std::pair<double, double> fit_power_law(const std::vector<double>& x,
                                        const std::vector<double>& y);

struct ConvergenceRow {
  long long n = 0;
  double h_star = 0.0;
  double mse = 0.0;
  double mc_standard_error = 0.0;
};

struct ConvergenceResult {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<ConvergenceRow> table;
};

// For each n: h* = optimal_bandwidth(n, d, r), geometric spread,
// Lagrange weights, grid-averaged empirical MSE. Row k of the sweep
// derives its stream seed as derive_stream_seed(seed, k). Returns the
// ln-ln OLS fit over the table.
ConvergenceResult convergence_sweep(const ReferenceDistribution& dist, int d, int r,
                                    const std::vector<long long>& n_list, int trials,
                                    const EvaluationGrid& grid, std::uint64_t seed,
                                    double spread_ratio);

enum class SweepMode { richardson, constrained };

struct PairSweepCell {
  double h1 = 0.0;
  double h2 = 0.0;
  bool missing = true;
  double mse = 0.0;
  std::vector<double> weights;
};

// Row-major over (h1_list x h2_list). Cells on or too close to the
// diagonal are missing; cells whose weight solve or estimator
// construction fails are missing; every present cell shares the same
// base seed (common random numbers), which makes richardson-mode MSE
// exactly symmetric under (h1, h2) swap.
struct PairSweepResult {
  std::vector<double> h1_list;
  std::vector<double> h2_list;
  std::vector<PairSweepCell> cells;

  const PairSweepCell& cell(std::size_t i, std::size_t j) const {
    return cells[i * h2_list.size() + j];
  }
};

PairSweepResult h_pair_sweep(const ReferenceDistribution& dist, int d, long long n,
                             const std::vector<double>& h1_list,
                             const std::vector<double>& h2_list, int trials,
                             const EvaluationGrid& grid, std::uint64_t seed,
                             SweepMode mode);

}  // namespace richkde
