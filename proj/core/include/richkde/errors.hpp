#pragma once

#include <stdexcept>
#include <string>

namespace richkde {

// Bandwidth sets whose squared entries are too close for the weight
// systems to be solvable in double precision.
class IllConditionedBandwidths : public std::invalid_argument {
public:
  explicit IllConditionedBandwidths(const std::string& what)
      : std::invalid_argument(what) {}
};

// The dense linear route detected an effectively singular system.
class SingularSystem : public std::invalid_argument {
public:
  explicit SingularSystem(const std::string& what)
      : std::invalid_argument(what) {}
};

// The constrained weight quadratic has no real root.
class NoFeasibleWeights : public std::invalid_argument {
public:
  explicit NoFeasibleWeights(const std::string& what)
      : std::invalid_argument(what) {}
};

// An iteration failed to converge within its budget.
class NumericalFailure : public std::runtime_error {
public:
  explicit NumericalFailure(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace richkde
