#pragma once

#include <Eigen/Dense>

#include "richkde/sample.hpp"

namespace richkde {

// exp(-||u||^2 / 2) / (2*pi)^(d/2)
double gaussian_kernel(Eigen::Ref<const Eigen::VectorXd> u, int d);

// Gaussian product kernel density estimate at one point:
//   (1 / (n h^d)) * sum_i exp(-||(x - X_i)/h||^2 / 2) / (2*pi)^(d/2).
// Exponent arguments above 700 contribute exactly 0 so the sum never
// touches subnormal exp() results; the accumulation is compensated so
// the value is permutation-invariant to ~1e-15 relative.
double kde_evaluate(const Sample& sample, double h, Eigen::Ref<const Eigen::VectorXd> x);

// Row-wise kde_evaluate over a grid; identical per-point results.
Eigen::VectorXd kde_evaluate_grid(const Sample& sample, double h, const EvaluationGrid& grid);

namespace detail {

// Neumaier variant of Kahan summation.
class CompensatedSum {
public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

}  // namespace richkde
