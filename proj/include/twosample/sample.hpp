#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace twosample {

/// Observations are stored one per row so that each point is contiguous.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A finite, non-empty set of d-dimensional observations with finite
/// coordinates. Immutable after construction.
class Sample {
 public:
  explicit Sample(PointMatrix points);

  /// One-dimensional sample from a list of values.
  static Sample from_values(std::span<const double> values);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }

  const PointMatrix& points() const { return points_; }

  std::span<const double> point(std::size_t i) const {
    return {points_.data() + i * dim(), dim()};
  }

  /// Coordinates of a 1-D sample. Throws std::invalid_argument otherwise.
  std::vector<double> values() const;

  void require_univariate() const;

 private:
  PointMatrix points_;
};

/// Stacks x on top of y (x first). Dimensions must agree.
Sample concatenate(const Sample& x, const Sample& y);

/// Rows of `s` selected by `indices`, in that order.
Sample select(const Sample& s, std::span<const std::size_t> indices);

void require_same_dim(const Sample& x, const Sample& y);

}  // namespace twosample
