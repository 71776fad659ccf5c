#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "richkde/sample.hpp"

namespace richkde {

// Ground-truth densities with exact closed forms and seeded samplers.
// Components are spherical Gaussians (scalar standard deviation); the
// standard normal is the one-component special case.
class ReferenceDistribution {
public:
  struct Component {
    double weight;
    Eigen::VectorXd mean;
    double stdev;
  };

  static ReferenceDistribution standard_normal(int d);
  static ReferenceDistribution gaussian_mixture(std::vector<Component> components);

  int dim() const { return d_; }
  const std::vector<Component>& components() const { return components_; }

  double true_density(Eigen::Ref<const Eigen::VectorXd> x) const;

  // n IID rows; deterministic across platforms for a fixed
  // (seed, n, distribution). Per observation: one uniform picks the
  // component (only when there are several), then d Box-Muller normals
  // fill the row; the pair cache is cleared at each row start.
  Sample sample(long long n, std::uint64_t seed) const;

private:
  ReferenceDistribution(int d, std::vector<Component> components);

  int d_;
  std::vector<Component> components_;
};

}  // namespace richkde
