#include "richkde/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "richkde/parallel.hpp"

namespace richkde {

namespace {

constexpr double kExpCutoff = 700.0;  // exp(-700) ~ 1e-304, below it terms are dropped exactly

double kde_point(const Eigen::MatrixXd& data, double h, Eigen::Ref<const Eigen::VectorXd> x) {
  const auto n = data.rows();
  const auto d = data.cols();
  detail::CompensatedSum acc;
  for (Eigen::Index i = 0; i < n; ++i) {
    double q = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double u = (x[j] - data(i, j)) / h;
      q += 0.5 * u * u;
    }
    if (q > kExpCutoff) continue;
    acc.add(std::exp(-q));
  }
  const double norm =
      static_cast<double>(n) * std::pow(h, static_cast<double>(d)) *
      std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(d));
  return acc.value() / norm;
}

void check_eval_args(const Sample& sample, double h, Eigen::Index query_dim) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("kde_evaluate: bandwidth must be positive and finite");
  if (query_dim != sample.dim())
    throw std::invalid_argument("kde_evaluate: query dimension does not match sample");
}

}  // namespace

double gaussian_kernel(Eigen::Ref<const Eigen::VectorXd> u, int d) {
  if (u.size() != d)
    throw std::invalid_argument("gaussian_kernel: dimension mismatch");
  if (!u.allFinite())
    throw std::invalid_argument("gaussian_kernel: non-finite input");
  return std::exp(-0.5 * u.squaredNorm()) /
         std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(d));
}

double kde_evaluate(const Sample& sample, double h, Eigen::Ref<const Eigen::VectorXd> x) {
  check_eval_args(sample, h, x.size());
  if (!x.allFinite())
    throw std::invalid_argument("kde_evaluate: non-finite query point");
  return kde_point(sample.data(), h, x);
}

Eigen::VectorXd kde_evaluate_grid(const Sample& sample, double h, const EvaluationGrid& grid) {
  check_eval_args(sample, h, grid.dim());
  Eigen::VectorXd out(grid.size());
  parallel_for(static_cast<std::size_t>(grid.size()),
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t k = begin; k < end; ++k) {
                   const auto row = static_cast<Eigen::Index>(k);
                   out[row] = kde_point(sample.data(), h, grid.points().row(row).transpose());
                 }
               });
  return out;
}

}  // namespace richkde
