#include "richkde/extrapolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "richkde/kernel.hpp"

namespace richkde {

BandwidthSet::BandwidthSet(std::vector<double> values, bool enforce_separation)
    : values_(std::move(values)) {
  if (values_.empty())
    throw std::invalid_argument("BandwidthSet: need at least one bandwidth");
  for (double h : values_)
    if (!(h > 0.0) || !std::isfinite(h))
      throw std::invalid_argument("BandwidthSet: bandwidths must be positive and finite");
  std::sort(values_.begin(), values_.end());
  if (enforce_separation && values_.size() > 1 &&
      separation_gauge() < kSeparationThreshold)
    throw IllConditionedBandwidths(
        "BandwidthSet: squared bandwidths closer than separation threshold " +
        std::to_string(kSeparationThreshold));
}

double BandwidthSet::separation_gauge() const {
  if (values_.size() < 2) return std::numeric_limits<double>::infinity();
  const double hmax2 = values_.back() * values_.back();
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < values_.size(); ++i) {
    const double gap =
        values_[i] * values_[i] - values_[i - 1] * values_[i - 1];
    min_gap = std::min(min_gap, gap);
  }
  return min_gap / hmax2;
}

WeightVector::WeightVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty())
    throw std::invalid_argument("WeightVector: empty");
  for (double w : weights_)
    if (!std::isfinite(w))
      throw std::invalid_argument("WeightVector: non-finite weight");
}

WeightVector lagrange_weights(const BandwidthSet& bandwidths) {
  if (bandwidths.order() > 1 &&
      bandwidths.separation_gauge() < BandwidthSet::kSeparationThreshold)
    throw IllConditionedBandwidths(
        "lagrange_weights: bandwidths below separation threshold");
  const auto& h = bandwidths.values();
  const std::size_t r = h.size();
  std::vector<double> c(r);
  for (std::size_t i = 0; i < r; ++i) {
    double prod = 1.0;
    const double hi2 = h[i] * h[i];
    for (std::size_t j = 0; j < r; ++j) {
      if (j == i) continue;
      const double hj2 = h[j] * h[j];
      prod *= -hj2 / (hi2 - hj2);
    }
    c[i] = prod;
  }
  return WeightVector(std::move(c));
}

WeightVector solve_weights_linear(const BandwidthSet& bandwidths) {
  const auto& h = bandwidths.values();
  const int r = bandwidths.order();
  Eigen::MatrixXd system(r, r);
  for (int j = 0; j < r; ++j) {
    const double hj2 = h[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(j)];
    double power = 1.0;
    for (int i = 0; i < r; ++i) {
      system(i, j) = power;
      power *= hj2;
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r);
  rhs[0] = 1.0;
  Eigen::VectorXd solution = Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(rhs);

  if (!solution.allFinite())
    throw SingularSystem("solve_weights_linear: system is singular");
  const double magnitude = solution.cwiseAbs().maxCoeff();
  if (magnitude > 1e12)
    throw SingularSystem(
        "solve_weights_linear: weights exceed 1e12, no significant digits remain");
  WeightVector weights(std::vector<double>(solution.data(), solution.data() + r));
  const double residual =
      constraint_residual(bandwidths, weights).cwiseAbs().maxCoeff();
  if (residual > 1e-6)
    throw SingularSystem("solve_weights_linear: residual " +
                         std::to_string(residual) + " exceeds 1e-6");
  return weights;
}

Eigen::VectorXd constraint_residual(const BandwidthSet& bandwidths,
                                    const WeightVector& weights) {
  if (bandwidths.order() != weights.order())
    throw std::invalid_argument("constraint_residual: length mismatch");
  const auto& h = bandwidths.values();
  const auto& c = weights.values();
  const std::size_t r = c.size();
  Eigen::VectorXd residual(static_cast<Eigen::Index>(r));

  detail::CompensatedSum sum0;
  for (double w : c) sum0.add(w);
  residual[0] = sum0.value() - 1.0;

  for (std::size_t j = 1; j < r; ++j) {
    detail::CompensatedSum num;
    double den = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      const double moment = std::pow(h[i] * h[i], static_cast<double>(j));
      num.add(c[i] * moment);
      den += std::abs(c[i]) * moment;
    }
    residual[static_cast<Eigen::Index>(j)] = num.value() / den;
  }
  return residual;
}

ExtrapolatedEstimator::ExtrapolatedEstimator(Sample sample, BandwidthSet bandwidths,
                                             WeightVector weights)
    : sample_(std::move(sample)),
      bandwidths_(std::move(bandwidths)),
      weights_(std::move(weights)) {
  if (bandwidths_.order() != weights_.order())
    throw std::invalid_argument(
        "ExtrapolatedEstimator: weights and bandwidths length mismatch");
  double sum_abs = 0.0, max_abs = 0.0;
  detail::CompensatedSum sum;
  for (double w : weights_.values()) {
    sum.add(w);
    sum_abs += std::abs(w);
    max_abs = std::max(max_abs, std::abs(w));
  }
  if (max_abs > 1e8)
    throw IllConditionedBandwidths(
        "ExtrapolatedEstimator: weight magnitude exceeds 1e8");
  if (std::abs(sum.value() - 1.0) > 1e-10 * std::max(1.0, sum_abs))
    throw std::invalid_argument("ExtrapolatedEstimator: weights do not sum to 1");
}

double extrapolated_evaluate(const ExtrapolatedEstimator& est,
                             Eigen::Ref<const Eigen::VectorXd> x) {
  const auto& h = est.bandwidths().values();
  const auto& c = est.weights().values();
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < c.size(); ++i)
    acc.add(c[i] * kde_evaluate(est.sample(), h[i], x));
  return acc.value();
}

Eigen::VectorXd extrapolated_evaluate_grid(const ExtrapolatedEstimator& est,
                                           const EvaluationGrid& grid) {
  const auto& h = est.bandwidths().values();
  const auto& c = est.weights().values();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    out += c[i] * kde_evaluate_grid(est.sample(), h[i], grid);
  return out;
}

namespace {

double quadratic_value(double a, double b, double c0, double x) {
  return (a * x + b) * x + c0;
}

// Two Newton steps tighten a root of a*x^2 + b*x + c0 computed by the
// stable quadratic formula; near-double roots gain the most.
double polish_root(double a, double b, double c0, double x) {
  for (int step = 0; step < 2; ++step) {
    const double derivative = 2.0 * a * x + b;
    if (derivative == 0.0) break;
    x -= quadratic_value(a, b, c0, x) / derivative;
  }
  return x;
}

}  // namespace

WeightVector solve_constrained_weights(const BandwidthSet& bandwidths,
                                       const Eigen::Matrix2d& variance_matrix,
                                       const Eigen::Matrix2d& bias_matrix) {
  if (bandwidths.order() != 2)
    throw std::invalid_argument("solve_constrained_weights: implemented for r = 2 only");
  const double scale = std::max(variance_matrix.cwiseAbs().maxCoeff(),
                                bias_matrix.cwiseAbs().maxCoeff());
  if (std::abs(variance_matrix(0, 1) - variance_matrix(1, 0)) > 1e-12 * scale ||
      std::abs(bias_matrix(0, 1) - bias_matrix(1, 0)) > 1e-12 * scale)
    throw std::invalid_argument("solve_constrained_weights: matrices must be symmetric");

  // c = (c1, 1 - c1) turns c'(V - B)c = 0 into a*c1^2 + b*c1 + c0 = 0.
  const Eigen::Matrix2d gap = variance_matrix - bias_matrix;
  const double a = gap(0, 0) - 2.0 * gap(0, 1) + gap(1, 1);
  const double b = 2.0 * (gap(0, 1) - gap(1, 1));
  const double c0 = gap(1, 1);
  const double degenerate = 1e-14 * std::max(scale, 1e-300);

  std::vector<double> roots;
  if (std::abs(a) < degenerate && std::abs(b) < degenerate &&
      std::abs(c0) < degenerate) {
    // V = B: every c on the sum-to-one line satisfies the constraint;
    // hand back the moment-constrained weights as the representative.
    return lagrange_weights(bandwidths);
  }
  if (std::abs(a) < degenerate) {
    if (std::abs(b) < degenerate)
      throw NoFeasibleWeights("solve_constrained_weights: constant nonzero quadratic");
    roots.push_back(-c0 / b);
  } else {
    const double disc = b * b - 4.0 * a * c0;
    if (disc < 0.0)
      throw NoFeasibleWeights("solve_constrained_weights: no real root");
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
      roots.push_back(polish_root(a, b, c0, q / a));
      roots.push_back(polish_root(a, b, c0, c0 / q));
    } else {
      roots.push_back(polish_root(a, b, c0, 0.0));
    }
  }

  double best_proxy = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  for (double c1 : roots) {
    if (!std::isfinite(c1)) continue;
    Eigen::Vector2d c(c1, 1.0 - c1);
    const double proxy = c.dot(variance_matrix * c) + c.dot(bias_matrix * c);
    if (proxy < best_proxy) {
      best_proxy = proxy;
      best = {c[0], c[1]};
    }
  }
  if (best.empty())
    throw NoFeasibleWeights("solve_constrained_weights: no finite root");
  return WeightVector(std::move(best));
}

}  // namespace richkde
