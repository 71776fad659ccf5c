#pragma once

#include <Eigen/Dense>
#include <vector>

#include "richkde/errors.hpp"
#include "richkde/sample.hpp"

namespace richkde {

// The r bandwidths h_1 < ... < h_r feeding one extrapolated estimator.
// Stored sorted ascending. The checked constructor rejects sets whose
// squared values are too close (separation gauge below threshold); the
// `unchecked` constructor skips only that gauge, for callers probing
// deliberately degenerate systems.
class BandwidthSet {
public:
  static constexpr double kSeparationThreshold = 1e-6;

  explicit BandwidthSet(std::vector<double> values)
      : BandwidthSet(std::move(values), /*enforce_separation=*/true) {}

  static BandwidthSet unchecked(std::vector<double> values) {
    return BandwidthSet(std::move(values), /*enforce_separation=*/false);
  }

  const std::vector<double>& values() const { return values_; }
  int order() const { return static_cast<int>(values_.size()); }

  // min_{i != j} |h_i^2 - h_j^2| / max_k h_k^2
  double separation_gauge() const;

private:
  BandwidthSet(std::vector<double> values, bool enforce_separation);

  std::vector<double> values_;
};

// Extrapolation coefficients c_1..c_r. Deliberately thin: finiteness
// and non-emptiness only, so solver outputs with violated moment rows
// (the constrained solver, the raw linear route) remain representable.
// Sum-to-one and magnitude are enforced where an estimator is built.
class WeightVector {
public:
  explicit WeightVector(std::vector<double> weights);

  const std::vector<double>& values() const { return weights_; }
  int order() const { return static_cast<int>(weights_.size()); }

private:
  std::vector<double> weights_;
};

// Closed-form product weights c_i = prod_{j != i} -h_j^2 / (h_i^2 - h_j^2).
// Never forms the r x r system.
WeightVector lagrange_weights(const BandwidthSet& bandwidths);

// Direct dense solve of the Vandermonde-in-h^2 system R c = e_1 by LU
// with partial pivoting; the conditioning-comparison route. Returns the
// raw solution without residual repair. Throws SingularSystem when the
// solution is non-finite, its constraint residual exceeds 1e-6, or its
// magnitude exceeds 1e12 (no significant digits left).
WeightVector solve_weights_linear(const BandwidthSet& bandwidths);

// Residual of the moment system. Entry 0: sum(c) - 1 (signed, absolute
// scale). Entry j >= 1: sum_i c_i h_i^{2j} / sum_i |c_i| h_i^{2j}.
// Sums are compensated so the gauge reflects the weights, not the
// accumulation order.
Eigen::VectorXd constraint_residual(const BandwidthSet& bandwidths,
                                    const WeightVector& weights);

// Sample + bandwidths + weights, validated together: lengths agree,
// sum(c) = 1 within 1e-10 relative, max|c_i| <= 1e8 (the magnitude
// guard; beyond it the signed combination has no significant digits).
class ExtrapolatedEstimator {
public:
  ExtrapolatedEstimator(Sample sample, BandwidthSet bandwidths, WeightVector weights);

  const Sample& sample() const { return sample_; }
  const BandwidthSet& bandwidths() const { return bandwidths_; }
  const WeightVector& weights() const { return weights_; }

private:
  Sample sample_;
  BandwidthSet bandwidths_;
  WeightVector weights_;
};

// sum_i c_i * kde_evaluate(sample, h_i, x); signed, returned raw.
double extrapolated_evaluate(const ExtrapolatedEstimator& est,
                             Eigen::Ref<const Eigen::VectorXd> x);

Eigen::VectorXd extrapolated_evaluate_grid(const ExtrapolatedEstimator& est,
                                           const EvaluationGrid& grid);

// Experimental r=2 solver: keep sum(c) = 1, drop the order-2 moment row,
// and instead impose c'Vc = c'Bc. Substituting c_2 = 1 - c_1 gives a
// quadratic in c_1; among its real roots the one minimizing
// c'Vc + c'Bc is returned. V = B degenerates to the whole line, for
// which the Lagrange weights are returned as canonical representative.
WeightVector solve_constrained_weights(const BandwidthSet& bandwidths,
                                       const Eigen::Matrix2d& variance_matrix,
                                       const Eigen::Matrix2d& bias_matrix);

}  // namespace richkde
