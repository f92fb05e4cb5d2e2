#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace twosample {

/// Sorted 1-D sample with its step CDF F_n and left-continuous quantile
/// function F_n^{-1}(t) = inf{x : F_n(x) >= t}.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> values);

  std::span<const double> sorted_values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

  /// Number of values <= x.
  std::size_t count_le(double x) const;
  /// Number of values < x.
  std::size_t count_lt(double x) const;

  double cdf(double x) const;

  /// Requires 0 < t <= 1. Returns the ceil(t n)-th order statistic; levels
  /// within a few ulps of k/n are snapped to k/n.
  double quantile(double t) const;

  /// k-th order statistic, 1-based (1 <= k <= n).
  double order_statistic(std::size_t k) const { return sorted_[k - 1]; }

 private:
  std::vector<double> sorted_;
};

EmpiricalDistribution build_empirical(std::span<const double> sample);

/// Piecewise-constant function on [0,1].
///
/// Piece k covers the interval between breakpoints[k] and breakpoints[k+1].
/// `Continuity::kLeft` pieces are (lo, hi] (quantile-type curves such as the
/// ODC), `Continuity::kRight` pieces are [lo, hi) (CDF-type curves such as
/// the ROC). The endpoint not covered by any piece takes `endpoint` when
/// given, else the value of the adjacent piece.
class StepFunction {
 public:
  enum class Continuity { kLeft, kRight };

  StepFunction(std::vector<double> breakpoints, std::vector<double> values,
               Continuity continuity,
               std::optional<double> endpoint = std::nullopt);

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  std::size_t piece_count() const { return values_.size(); }
  Continuity continuity() const { return continuity_; }
  std::optional<double> endpoint() const { return endpoint_; }

  double lo(std::size_t k) const { return breakpoints_[k]; }
  double hi(std::size_t k) const { return breakpoints_[k + 1]; }

  double operator()(double t) const;

  /// Exact integral over [0,1].
  double integral() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  Continuity continuity_;
  std::optional<double> endpoint_;
};

/// Empirical ODC curve t -> G_m(F_n^{-1}(t)); value G_m(X_(k)) on
/// ((k-1)/n, k/n] and 0 at t = 0. Ties between samples count as "<=".
StepFunction odc_curve(const EmpiricalDistribution& x,
                       const EmpiricalDistribution& y);

/// Empirical ROC curve t -> 1 - F_n(G_m^{-1}(1 - t)); value
/// 1 - F_n(Y_(m-j)) on [j/m, (j+1)/m) and 1 at t = 1.
StepFunction roc_curve(const EmpiricalDistribution& x,
                       const EmpiricalDistribution& y);

/// Area under a ROC curve; P(Y < X) for the plug-in ROC.
double auc(const StepFunction& roc);

/// Writes `t_lo,t_hi,value` rows, one per constant piece.
void write_step_csv(std::ostream& os, const StepFunction& f);

}  // namespace twosample
