#include "twosample/sample.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twosample {

Sample::Sample(PointMatrix points) : points_(std::move(points)) {
  if (points_.rows() == 0) throw std::invalid_argument("empty sample");
  if (points_.cols() == 0) {
    throw std::invalid_argument("sample dimension must be positive");
  }
  if (!points_.allFinite()) {
    throw std::invalid_argument("sample contains non-finite coordinates");
  }
}

Sample Sample::from_values(std::span<const double> values) {
  PointMatrix m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = values[i];
  }
  return Sample(std::move(m));
}

std::vector<double> Sample::values() const {
  require_univariate();
  return {points_.data(), points_.data() + points_.rows()};
}

void Sample::require_univariate() const {
  if (dim() != 1) {
    throw std::invalid_argument("expected a 1-D sample, got dimension " +
                                std::to_string(dim()));
  }
}

void require_same_dim(const Sample& x, const Sample& y) {
  if (x.dim() != y.dim()) {
    throw std::invalid_argument("dimension mismatch: " +
                                std::to_string(x.dim()) + " vs " +
                                std::to_string(y.dim()));
  }
}

Sample concatenate(const Sample& x, const Sample& y) {
  require_same_dim(x, y);
  PointMatrix m(x.points().rows() + y.points().rows(), x.points().cols());
  m << x.points(), y.points();
  return Sample(std::move(m));
}

Sample select(const Sample& s, std::span<const std::size_t> indices) {
  PointMatrix m(static_cast<Eigen::Index>(indices.size()),
                static_cast<Eigen::Index>(s.dim()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    m.row(static_cast<Eigen::Index>(r)) =
        s.points().row(static_cast<Eigen::Index>(indices[r]));
  }
  return Sample(std::move(m));
}

}  // namespace twosample
