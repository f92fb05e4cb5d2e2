#include "twosample/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace twosample {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values)
    : sorted_(std::move(values)) {
  if (sorted_.empty()) throw std::invalid_argument("empty sample");
  for (double v : sorted_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("sample contains non-finite values");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
}

std::size_t EmpiricalDistribution::count_le(double x) const {
  return static_cast<std::size_t>(
      std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
}

std::size_t EmpiricalDistribution::count_lt(double x) const {
  return static_cast<std::size_t>(
      std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
}

double EmpiricalDistribution::cdf(double x) const {
  return static_cast<double>(count_le(x)) / static_cast<double>(size());
}

double EmpiricalDistribution::quantile(double t) const {
  if (!(t > 0.0 && t <= 1.0)) {
    throw std::invalid_argument("quantile level out of range");
  }
  const double n = static_cast<double>(size());
  const double scaled =
      t * n * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
  auto k = static_cast<std::size_t>(std::ceil(scaled));
  k = std::clamp<std::size_t>(k, 1, size());
  return sorted_[k - 1];
}

EmpiricalDistribution build_empirical(std::span<const double> sample) {
  return EmpiricalDistribution({sample.begin(), sample.end()});
}

StepFunction::StepFunction(std::vector<double> breakpoints,
                           std::vector<double> values, Continuity continuity,
                           std::optional<double> endpoint)
    : breakpoints_(std::move(breakpoints)),
      values_(std::move(values)),
      continuity_(continuity),
      endpoint_(endpoint) {
  if (values_.empty() || breakpoints_.size() != values_.size() + 1) {
    throw std::invalid_argument(
        "step function needs one more breakpoint than values");
  }
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0) {
    throw std::invalid_argument("step function must span [0,1]");
  }
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1])) {
      throw std::invalid_argument("breakpoints must be strictly increasing");
    }
  }
}

double StepFunction::operator()(double t) const {
  if (endpoint_) {
    if (continuity_ == Continuity::kLeft && t <= 0.0) return *endpoint_;
    if (continuity_ == Continuity::kRight && t >= 1.0) return *endpoint_;
  }
  const auto inner_begin = breakpoints_.begin() + 1;
  const auto inner_end = breakpoints_.end() - 1;
  std::size_t k = 0;
  if (continuity_ == Continuity::kLeft) {
    // first piece whose upper end is >= t
    k = static_cast<std::size_t>(
        std::lower_bound(inner_begin, inner_end, t) - inner_begin);
  } else {
    // last piece whose lower end is <= t
    k = static_cast<std::size_t>(
        std::upper_bound(inner_begin, inner_end, t) - inner_begin);
  }
  return values_[std::min(k, values_.size() - 1)];
}

double StepFunction::integral() const {
  double total = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    total += (hi(k) - lo(k)) * values_[k];
  }
  return total;
}

StepFunction odc_curve(const EmpiricalDistribution& x,
                       const EmpiricalDistribution& y) {
  const std::size_t n = x.size();
  const double m = static_cast<double>(y.size());
  const auto ys = y.sorted_values();
  std::vector<double> breaks(n + 1);
  std::vector<double> values(n);
  std::size_t below = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double xk = x.sorted_values()[k];
    while (below < ys.size() && ys[below] <= xk) ++below;
    values[k] = static_cast<double>(below) / m;
    breaks[k] = static_cast<double>(k) / static_cast<double>(n);
  }
  breaks[n] = 1.0;
  return StepFunction(std::move(breaks), std::move(values),
                      StepFunction::Continuity::kLeft, 0.0);
}

StepFunction roc_curve(const EmpiricalDistribution& x,
                       const EmpiricalDistribution& y) {
  const std::size_t m = y.size();
  const double n = static_cast<double>(x.size());
  std::vector<double> breaks(m + 1);
  std::vector<double> values(m);
  for (std::size_t j = 0; j < m; ++j) {
    // on [j/m, (j+1)/m) the level 1 - t lies in ((m-j-1)/m, (m-j)/m]
    const double yq = y.order_statistic(m - j);
    values[j] = static_cast<double>(x.size() - x.count_le(yq)) / n;
    breaks[j] = static_cast<double>(j) / static_cast<double>(m);
  }
  breaks[m] = 1.0;
  return StepFunction(std::move(breaks), std::move(values),
                      StepFunction::Continuity::kRight, 1.0);
}

double auc(const StepFunction& roc) { return roc.integral(); }

void write_step_csv(std::ostream& os, const StepFunction& f) {
  const auto old_precision = os.precision(17);
  os << "t_lo,t_hi,value\n";
  for (std::size_t k = 0; k < f.piece_count(); ++k) {
    os << f.lo(k) << ',' << f.hi(k) << ',' << f.values()[k] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace twosample
