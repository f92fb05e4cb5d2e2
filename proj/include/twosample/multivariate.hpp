#pragma once

#include "twosample/sample.hpp"
#include "twosample/transport.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string_view>
#include <variant>

namespace twosample {

/// Gaussian kernel k(a, b) = exp(-||a - b||^2 / gamma^2).
struct KernelSpec {
  enum class Kind { kGaussian };

  Kind kind = Kind::kGaussian;
  double gamma = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const;
};

KernelSpec gaussian_kernel(double gamma);

/// Median of the pairwise Euclidean distances of the pooled sample.
double median_heuristic_bandwidth(const Sample& x, const Sample& y);

enum class MultivariateKind { kEnergyDistance, kMmd2U, kSmoothedWasserstein };

std::string_view to_string(MultivariateKind kind);

struct TransportParams {
  double p = 1.0;
  double lambda = 0.0;
};

struct MultivariateStatistic {
  MultivariateKind kind;
  double value = 0.0;
  std::variant<std::monostate, KernelSpec, TransportParams> params;
};

/// V-statistics (diagonal included) are the default; kUnbiased drops the
/// within-sample diagonal and normalizes by n(n-1).
enum class Estimator { kBiased, kUnbiased };

using DistanceFn =
    std::function<double(std::span<const double>, std::span<const double>)>;

DistanceFn euclidean_distance();

/// d(x, y) = (k(x,x) + k(y,y)) / 2 - k(x, y).
DistanceFn kernel_to_distance(const KernelSpec& kernel);

/// ED_b = 2/(mn) sum ||X_i - Y_j|| - 1/n^2 sum ||X_i - X_j||
///        - 1/m^2 sum ||Y_i - Y_j||.
MultivariateStatistic energy_distance(const Sample& x, const Sample& y,
                                      Estimator estimator = Estimator::kBiased);

/// ED_b with the Euclidean norm replaced by an arbitrary distance.
MultivariateStatistic generalized_energy_distance(
    const Sample& x, const Sample& y, const DistanceFn& distance,
    Estimator estimator = Estimator::kBiased);

/// 1/n^2 sum k(X_i,X_j) + 1/m^2 sum k(Y_i,Y_j) - 2/(mn) sum k(X_i,Y_j).
MultivariateStatistic mmd2(const Sample& x, const Sample& y,
                           const KernelSpec& kernel,
                           Estimator estimator = Estimator::kBiased);

/// mmd2 with the median-heuristic bandwidth.
MultivariateStatistic mmd2(const Sample& x, const Sample& y,
                           Estimator estimator = Estimator::kBiased);

/// 2 S(x,y) - S(x,x) - S(y,y) with S the entropic transport cost.
MultivariateStatistic smoothed_wasserstein_statistic(
    const Sample& x, const Sample& y, double p, double lambda,
    const SinkhornOptions& options = {});

/// Pairwise matrix of a pooled sample, for statistics of the form
///   sign * (2/(nm) S_xy - S_xx/n^2 - S_yy/m^2)
/// where S are block sums. Distances give ED (sign +1), kernel values give
/// MMD^2 (sign -1). Relabelings only need to recompute the block sums.
struct PairwiseForm {
  Eigen::MatrixXd matrix;
  double sign = 1.0;
  Eigen::VectorXd row_sums;
  double total = 0.0;  // sum of all entries

  double statistic(std::span<const std::size_t> x_idx,
                   std::span<const std::size_t> y_idx) const;
};

PairwiseForm energy_pairwise_form(const Sample& pooled);
PairwiseForm mmd_pairwise_form(const Sample& pooled, const KernelSpec& kernel);

}  // namespace twosample
