#include "richkde/error_analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "richkde/kernel.hpp"
#include "richkde/parallel.hpp"
#include "richkde/rng.hpp"
#include "richkde/selection.hpp"

namespace richkde {

namespace {

// T x m matrix of per-trial grid evaluations; trial t fills row t only,
// so parallel execution cannot change any value.
Eigen::MatrixXd run_trials(const ReferenceDistribution& dist, long long n,
                           const BandwidthSet& bandwidths, const WeightVector& weights,
                           const EvaluationGrid& grid,
                           std::span<const std::uint64_t> trial_seeds) {
  const auto trials = static_cast<Eigen::Index>(trial_seeds.size());
  Eigen::MatrixXd estimates(trials, grid.size());
  parallel_for(trial_seeds.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Sample sample = dist.sample(n, trial_seeds[t]);
      ExtrapolatedEstimator estimator(std::move(sample), bandwidths, weights);
      estimates.row(static_cast<Eigen::Index>(t)) =
          extrapolated_evaluate_grid(estimator, grid).transpose();
    }
  });
  return estimates;
}

double compensated_mean(const Eigen::VectorXd& values) {
  detail::CompensatedSum sum;
  for (Eigen::Index i = 0; i < values.size(); ++i) sum.add(values[i]);
  return sum.value() / static_cast<double>(values.size());
}

}  // namespace

MSEReport empirical_mse_with_seeds(const ReferenceDistribution& dist, long long n,
                                   const BandwidthSet& bandwidths,
                                   const WeightVector& weights,
                                   const EvaluationGrid& grid,
                                   std::span<const std::uint64_t> trial_seeds) {
  if (trial_seeds.size() < 2)
    throw std::invalid_argument("empirical_mse: need at least 2 trials");
  if (grid.dim() != dist.dim())
    throw std::invalid_argument("empirical_mse: grid dimension does not match distribution");

  const Eigen::MatrixXd estimates =
      run_trials(dist, n, bandwidths, weights, grid, trial_seeds);
  const auto trials = estimates.rows();
  const auto points = estimates.cols();
  const double t_count = static_cast<double>(trials);

  MSEReport report{grid,
                   static_cast<int>(trials),
                   {},
                   0.0,
                   0.0,
                   n,
                   static_cast<int>(dist.dim()),
                   bandwidths.order(),
                   bandwidths.values(),
                   weights.values(),
                   0};
  report.points.resize(static_cast<std::size_t>(points));

  Eigen::VectorXd trial_sq_error_mean = Eigen::VectorXd::Zero(trials);
  for (Eigen::Index j = 0; j < points; ++j) {
    const Eigen::VectorXd column = estimates.col(j);
    const double truth = dist.true_density(grid.points().row(j).transpose());
    const double mean = compensated_mean(column);

    detail::CompensatedSum sq_dev, sq_err;
    for (Eigen::Index t = 0; t < trials; ++t) {
      const double dev = column[t] - mean;
      const double err = column[t] - truth;
      sq_dev.add(dev * dev);
      sq_err.add(err * err);
    }
    PointStats& stats = report.points[static_cast<std::size_t>(j)];
    stats.mean_estimate = mean;
    stats.empirical_bias = mean - truth;
    stats.empirical_variance = sq_dev.value() / t_count;
    stats.empirical_mse = sq_err.value() / t_count;

    detail::CompensatedSum se_sum;
    for (Eigen::Index t = 0; t < trials; ++t) {
      const double err = column[t] - truth;
      const double centered = err * err - stats.empirical_mse;
      se_sum.add(centered * centered);
      trial_sq_error_mean[t] += err * err / static_cast<double>(points);
    }
    stats.mc_standard_error =
        std::sqrt(se_sum.value() / (t_count - 1.0) / t_count);
  }

  const double aggregate = compensated_mean(trial_sq_error_mean);
  detail::CompensatedSum agg_dev;
  for (Eigen::Index t = 0; t < trials; ++t) {
    const double centered = trial_sq_error_mean[t] - aggregate;
    agg_dev.add(centered * centered);
  }
  report.grid_mean_mse = aggregate;
  report.grid_mean_se = std::sqrt(agg_dev.value() / (t_count - 1.0) / t_count);
  return report;
}

MSEReport empirical_mse(const ReferenceDistribution& dist, long long n,
                        const BandwidthSet& bandwidths, const WeightVector& weights,
                        const EvaluationGrid& grid, int trials, std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("empirical_mse: need at least 2 trials");
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
  for (std::size_t t = 0; t < seeds.size(); ++t)
    seeds[t] = derive_stream_seed(seed, t);
  MSEReport report =
      empirical_mse_with_seeds(dist, n, bandwidths, weights, grid, seeds);
  report.seed = seed;
  return report;
}

double theoretical_variance_r2(double p_at_x, long long n, const BandwidthSet& h,
                               const WeightVector& c, int d) {
  if (!(p_at_x > 0.0) || !std::isfinite(p_at_x))
    throw std::invalid_argument("theoretical_variance_r2: density must be positive");
  if (n < 1) throw std::invalid_argument("theoretical_variance_r2: n must be >= 1");
  if (d < 1) throw std::invalid_argument("theoretical_variance_r2: d must be >= 1");
  if (h.order() != 2 || c.order() != 2)
    throw std::invalid_argument("theoretical_variance_r2: r must be 2");
  const double h1 = h.values()[0], h2 = h.values()[1];
  const double c1 = c.values()[0], c2 = c.values()[1];
  const double dd = static_cast<double>(d);
  const double bracket =
      c1 * c1 / std::pow(h1, dd) + c2 * c2 / std::pow(h2, dd) +
      2.0 * std::numbers::sqrt2 * c1 * c2 / std::pow(h1 * h1 + h2 * h2, 0.5 * dd);
  return p_at_x * bracket /
         (static_cast<double>(n) * std::pow(2.0 * std::numbers::pi, 0.5 * dd));
}

RiskMatrices risk_matrices(const BandwidthSet& bandwidths, long long n, int d) {
  if (n < 1) throw std::invalid_argument("risk_matrices: n must be >= 1");
  if (d < 1) throw std::invalid_argument("risk_matrices: d must be >= 1");
  const auto& h = bandwidths.values();
  const int r = bandwidths.order();
  RiskMatrices matrices{Eigen::MatrixXd(r, r), Eigen::MatrixXd(r, r), n, d};
  const double dd = static_cast<double>(d);
  for (int i = 0; i < r; ++i) {
    const double hi = h[static_cast<std::size_t>(i)];
    for (int j = 0; j < r; ++j) {
      const double hj = h[static_cast<std::size_t>(j)];
      if (i == j)
        matrices.V(i, j) = 1.0 / (static_cast<double>(n) * std::pow(hi, dd));
      else
        matrices.V(i, j) = std::numbers::sqrt2 /
                           (static_cast<double>(n) * std::pow(hi * hi + hj * hj, 0.5 * dd));
      matrices.B(i, j) = hi * hi * hj * hj;
    }
  }
  return matrices;
}

double quadratic_form(const WeightVector& c, const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || M.rows() != c.order())
    throw std::invalid_argument("quadratic_form: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> v(c.values().data(),
                                            static_cast<Eigen::Index>(c.order()));
  return v.dot(M * v);
}

std::pair<double, double> fit_power_law(const std::vector<double>& x,
                                        const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("fit_power_law: length mismatch");
  if (x.size() < 2)
    throw std::invalid_argument("fit_power_law: need at least 2 points");
  const auto count = static_cast<double>(x.size());
  double mean_lx = 0.0, mean_ly = 0.0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_power_law: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mean_lx += lx[i];
    mean_ly += ly[i];
  }
  mean_lx /= count;
  mean_ly /= count;
  double covariance = 0.0, variance = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    covariance += (lx[i] - mean_lx) * (ly[i] - mean_ly);
    variance += (lx[i] - mean_lx) * (lx[i] - mean_lx);
  }
  if (variance == 0.0)
    throw std::invalid_argument("fit_power_law: x values are all equal");
  const double slope = covariance / variance;
  return {slope, mean_ly - slope * mean_lx};
}

ConvergenceResult convergence_sweep(const ReferenceDistribution& dist, int d, int r,
                                    const std::vector<long long>& n_list, int trials,
                                    const EvaluationGrid& grid, std::uint64_t seed,
                                    double spread_ratio) {
  if (n_list.size() < 4)
    throw std::invalid_argument("convergence_sweep: need at least 4 sample sizes");
  for (std::size_t k = 1; k < n_list.size(); ++k)
    if (n_list[k] <= n_list[k - 1])
      throw std::invalid_argument("convergence_sweep: n_list must be strictly increasing");
  if (d != dist.dim())
    throw std::invalid_argument("convergence_sweep: d does not match distribution");

  ConvergenceResult result;
  result.table.reserve(n_list.size());
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    const long long n = n_list[k];
    const double h_star = optimal_bandwidth(n, d, r);
    const BandwidthSet bandwidths = spread_bandwidths(h_star, r, spread_ratio);
    const WeightVector weights = lagrange_weights(bandwidths);
    const MSEReport report = empirical_mse(dist, n, bandwidths, weights, grid, trials,
                                           derive_stream_seed(seed, k));
    result.table.push_back({n, h_star, report.grid_mean_mse, report.grid_mean_se});
  }

  std::vector<double> ns(n_list.size()), mses(n_list.size());
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    ns[k] = static_cast<double>(result.table[k].n);
    mses[k] = result.table[k].mse;
  }
  const auto [slope, intercept] = fit_power_law(ns, mses);
  result.slope = slope;
  result.intercept = intercept;
  return result;
}

PairSweepResult h_pair_sweep(const ReferenceDistribution& dist, int d, long long n,
                             const std::vector<double>& h1_list,
                             const std::vector<double>& h2_list, int trials,
                             const EvaluationGrid& grid, std::uint64_t seed,
                             SweepMode mode) {
  if (h1_list.empty() || h2_list.empty())
    throw std::invalid_argument("h_pair_sweep: empty bandwidth list");
  for (double h : h1_list)
    if (!(h > 0.0) || !std::isfinite(h))
      throw std::invalid_argument("h_pair_sweep: bandwidths must be positive");
  for (double h : h2_list)
    if (!(h > 0.0) || !std::isfinite(h))
      throw std::invalid_argument("h_pair_sweep: bandwidths must be positive");
  if (d != dist.dim())
    throw std::invalid_argument("h_pair_sweep: d does not match distribution");

  PairSweepResult result{h1_list, h2_list, {}};
  result.cells.resize(h1_list.size() * h2_list.size());

  parallel_for(result.cells.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const double h1 = h1_list[idx / h2_list.size()];
      const double h2 = h2_list[idx % h2_list.size()];
      PairSweepCell& cell = result.cells[idx];
      cell.h1 = h1;
      cell.h2 = h2;
      const double gauge =
          std::abs(h1 * h1 - h2 * h2) / std::max(h1 * h1, h2 * h2);
      if (gauge < BandwidthSet::kSeparationThreshold) continue;  // stays missing
      try {
        // BandwidthSet sorts, so (h1, h2) and (h2, h1) build the same
        // estimator; with the shared seed their MSEs match exactly.
        const BandwidthSet bandwidths({h1, h2});
        WeightVector weights = lagrange_weights(bandwidths);
        if (mode == SweepMode::constrained) {
          const RiskMatrices matrices = risk_matrices(bandwidths, n, d);
          weights = solve_constrained_weights(bandwidths, matrices.V, matrices.B);
        }
        const MSEReport report =
            empirical_mse(dist, n, bandwidths, weights, grid, trials, seed);
        cell.mse = report.grid_mean_mse;
        cell.weights = weights.values();
        cell.missing = false;
      } catch (const std::exception&) {
        // cell stays missing; a per-cell failure must not abort the sweep
      }
    }
  });
  return result;
}

}  // namespace richkde
