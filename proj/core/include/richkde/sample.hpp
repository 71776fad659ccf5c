#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace richkde {

// Observations stored row-wise: n rows, d columns. Immutable after
// construction; every entry must be finite.
class Sample {
public:
  explicit Sample(Eigen::MatrixXd data) : data_(std::move(data)) {
    if (data_.rows() < 1 || data_.cols() < 1)
      throw std::invalid_argument("Sample: need at least one row and one column");
    if (!data_.allFinite())
      throw std::invalid_argument("Sample: non-finite entry");
  }

  const Eigen::MatrixXd& data() const { return data_; }
  Eigen::Index size() const { return data_.rows(); }
  Eigen::Index dim() const { return data_.cols(); }

private:
  Eigen::MatrixXd data_;
};

// Query points, row-wise like Sample. Dimensions must match the sample
// they are evaluated against; that check lives at the evaluation call.
class EvaluationGrid {
public:
  explicit EvaluationGrid(Eigen::MatrixXd points) : points_(std::move(points)) {
    if (points_.rows() < 1 || points_.cols() < 1)
      throw std::invalid_argument("EvaluationGrid: need at least one point");
    if (!points_.allFinite())
      throw std::invalid_argument("EvaluationGrid: non-finite entry");
  }

  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }

private:
  Eigen::MatrixXd points_;
};

}  // namespace richkde
