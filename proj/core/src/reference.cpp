#include "richkde/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "richkde/rng.hpp"

namespace richkde {

ReferenceDistribution::ReferenceDistribution(int d, std::vector<Component> components)
    : d_(d), components_(std::move(components)) {
  if (d_ < 1) throw std::invalid_argument("ReferenceDistribution: d must be >= 1");
  if (components_.empty())
    throw std::invalid_argument("ReferenceDistribution: no components");
  double weight_sum = 0.0;
  for (const auto& comp : components_) {
    // weight 0 is legal: degenerate mixtures must match their support in distribution
    if (!(comp.weight >= 0.0) || !std::isfinite(comp.weight))
      throw std::invalid_argument("ReferenceDistribution: weights must be nonnegative");
    if (!(comp.stdev > 0.0) || !std::isfinite(comp.stdev))
      throw std::invalid_argument("ReferenceDistribution: stdevs must be positive");
    if (comp.mean.size() != d_ || !comp.mean.allFinite())
      throw std::invalid_argument("ReferenceDistribution: component mean has wrong dimension");
    weight_sum += comp.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12)
    throw std::invalid_argument("ReferenceDistribution: weights must sum to 1");
}

ReferenceDistribution ReferenceDistribution::standard_normal(int d) {
  if (d < 1) throw std::invalid_argument("standard_normal: d must be >= 1");
  Component comp{1.0, Eigen::VectorXd::Zero(d), 1.0};
  return ReferenceDistribution(d, {std::move(comp)});
}

ReferenceDistribution ReferenceDistribution::gaussian_mixture(
    std::vector<Component> components) {
  if (components.empty())
    throw std::invalid_argument("gaussian_mixture: no components");
  const int d = static_cast<int>(components.front().mean.size());
  return ReferenceDistribution(d, std::move(components));
}

double ReferenceDistribution::true_density(Eigen::Ref<const Eigen::VectorXd> x) const {
  if (x.size() != d_)
    throw std::invalid_argument("true_density: dimension mismatch");
  const double norm_base = std::pow(2.0 * std::numbers::pi, 0.5 * d_);
  double density = 0.0;
  for (const auto& comp : components_) {
    const double q = (x - comp.mean).squaredNorm() / (2.0 * comp.stdev * comp.stdev);
    density += comp.weight * std::exp(-q) /
               (norm_base * std::pow(comp.stdev, static_cast<double>(d_)));
  }
  return density;
}

Sample ReferenceDistribution::sample(long long n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Eigen::MatrixXd data(n, d_);
  NormalStream stream(seed);
  for (long long i = 0; i < n; ++i) {
    stream.reset_spare();
    std::size_t component = 0;
    if (components_.size() > 1) {
      const double u = stream.uniform01();
      double cumulative = 0.0;
      component = components_.size() - 1;
      for (std::size_t k = 0; k < components_.size(); ++k) {
        cumulative += components_[k].weight;
        if (u < cumulative) {
          component = k;
          break;
        }
      }
    }
    const auto& comp = components_[component];
    for (int j = 0; j < d_; ++j)
      data(i, j) = comp.mean[j] + comp.stdev * stream.next_normal();
  }
  return Sample(std::move(data));
}

}  // namespace richkde
