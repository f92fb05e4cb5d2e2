#include "twosample/multivariate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace twosample {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sq += d * d;
  }
  return sq;
}

// All statistics here are symmetric in (x, y). Evaluating them on a
// canonical ordering of the pair makes the floating-point result symmetric
// too.
bool should_swap(const Sample& x, const Sample& y) {
  if (x.size() != y.size()) return x.size() > y.size();
  const auto& a = x.points();
  const auto& b = y.points();
  return std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(),
                                      a.data() + a.size());
}

template <typename Fn>
double block_sum(const Sample& a, const Sample& b, Fn&& fn) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) row += fn(a.point(i), b.point(j));
    total += row;
  }
  return total;
}

template <typename Fn>
double within_sum(const Sample& a, Fn&& fn, bool include_diagonal) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i == j && !include_diagonal) continue;
      row += fn(a.point(i), a.point(j));
    }
    total += row;
  }
  return total;
}

double within_norm(std::size_t n, Estimator estimator) {
  const double dn = static_cast<double>(n);
  if (estimator == Estimator::kUnbiased) {
    if (n < 2) {
      throw std::invalid_argument("unbiased estimator needs >= 2 points per sample");
    }
    return dn * (dn - 1.0);
  }
  return dn * dn;
}

// 2/(nm) S_xy - S_xx/n^2 - S_yy/m^2 under the chosen normalization.
template <typename Fn>
double energy_form(const Sample& x, const Sample& y, Fn&& fn,
                   Estimator estimator) {
  require_same_dim(x, y);
  const Sample& a = should_swap(x, y) ? y : x;
  const Sample& b = should_swap(x, y) ? x : y;
  const bool diag = estimator == Estimator::kBiased;
  const double cross = block_sum(a, b, fn);
  const double within_a = within_sum(a, fn, diag);
  const double within_b = within_sum(b, fn, diag);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  return 2.0 * cross / (na * nb) - within_a / within_norm(a.size(), estimator) -
         within_b / within_norm(b.size(), estimator);
}

}  // namespace

double KernelSpec::operator()(std::span<const double> a,
                              std::span<const double> b) const {
  return std::exp(-squared_distance(a, b) / (gamma * gamma));
}

KernelSpec gaussian_kernel(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("kernel bandwidth gamma must be > 0");
  }
  return {KernelSpec::Kind::kGaussian, gamma};
}

double median_heuristic_bandwidth(const Sample& x, const Sample& y) {
  const Sample pooled = concatenate(x, y);
  const std::size_t n = pooled.size();
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dists.push_back(std::sqrt(squared_distance(pooled.point(i), pooled.point(j))));
    }
  }
  if (dists.empty()) return 1.0;
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid),
                   dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    const double lower =
        *std::max_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  // all points coincide; any bandwidth gives the same (zero) statistic
  return median > 0.0 ? median : 1.0;
}

std::string_view to_string(MultivariateKind kind) {
  switch (kind) {
    case MultivariateKind::kEnergyDistance:
      return "energy";
    case MultivariateKind::kMmd2U:
      return "mmd";
    case MultivariateKind::kSmoothedWasserstein:
      return "sinkhorn";
  }
  return "unknown";
}

DistanceFn euclidean_distance() {
  return [](std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
  };
}

DistanceFn kernel_to_distance(const KernelSpec& kernel) {
  return [kernel](std::span<const double> a, std::span<const double> b) {
    return 0.5 * (kernel(a, a) + kernel(b, b)) - kernel(a, b);
  };
}

MultivariateStatistic energy_distance(const Sample& x, const Sample& y,
                                      Estimator estimator) {
  const auto norm = [](std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
  };
  return {MultivariateKind::kEnergyDistance, energy_form(x, y, norm, estimator),
          std::monostate{}};
}

MultivariateStatistic generalized_energy_distance(const Sample& x,
                                                  const Sample& y,
                                                  const DistanceFn& distance,
                                                  Estimator estimator) {
  return {MultivariateKind::kEnergyDistance,
          energy_form(x, y, distance, estimator), std::monostate{}};
}

MultivariateStatistic mmd2(const Sample& x, const Sample& y,
                           const KernelSpec& kernel, Estimator estimator) {
  // MMD^2 is the energy form of the kernel with the sign flipped.
  const double value = -energy_form(x, y, kernel, estimator);
  return {MultivariateKind::kMmd2U, value, kernel};
}

MultivariateStatistic mmd2(const Sample& x, const Sample& y,
                           Estimator estimator) {
  return mmd2(x, y, gaussian_kernel(median_heuristic_bandwidth(x, y)),
              estimator);
}

MultivariateStatistic smoothed_wasserstein_statistic(
    const Sample& x, const Sample& y, double p, double lambda,
    const SinkhornOptions& options) {
  require_same_dim(x, y);
  const Sample& a = should_swap(x, y) ? y : x;
  const Sample& b = should_swap(x, y) ? x : y;
  const double cross = sinkhorn_divergence(a, b, p, lambda, options);
  const double self_a = sinkhorn_divergence(a, a, p, lambda, options);
  const double self_b = sinkhorn_divergence(b, b, p, lambda, options);
  return {MultivariateKind::kSmoothedWasserstein, 2.0 * cross - self_a - self_b,
          TransportParams{p, lambda}};
}

double PairwiseForm::statistic(std::span<const std::size_t> x_idx,
                               std::span<const std::size_t> y_idx) const {
  // Only the X block is summed pairwise; the rest follows from row sums.
  const auto rows = static_cast<std::size_t>(matrix.rows());
  double sxx = 0.0;
  double rx = 0.0;
  for (std::size_t a : x_idx) {
    const double* col = matrix.data() + a * rows;
    double row = 0.0;
    for (std::size_t b : x_idx) row += col[b];
    sxx += row;
    rx += row_sums[static_cast<Eigen::Index>(a)];
  }
  const double sxy = rx - sxx;
  const double syy = total - sxx - 2.0 * sxy;
  const double n = static_cast<double>(x_idx.size());
  const double m = static_cast<double>(y_idx.size());
  return sign * (2.0 * sxy / (n * m) - sxx / (n * n) - syy / (m * m));
}

namespace {

template <typename Fn>
PairwiseForm make_form(const Sample& pooled, Fn&& fn, double sign) {
  const auto n = static_cast<Eigen::Index>(pooled.size());
  PairwiseForm form;
  form.sign = sign;
  form.matrix.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = fn(pooled.point(static_cast<std::size_t>(i)),
                          pooled.point(static_cast<std::size_t>(j)));
      form.matrix(i, j) = v;
      form.matrix(j, i) = v;
    }
  }
  form.row_sums = form.matrix.rowwise().sum();
  form.total = form.row_sums.sum();
  return form;
}

}  // namespace

PairwiseForm energy_pairwise_form(const Sample& pooled) {
  return make_form(pooled, euclidean_distance(), 1.0);
}

PairwiseForm mmd_pairwise_form(const Sample& pooled, const KernelSpec& kernel) {
  return make_form(pooled, kernel, -1.0);
}

}  // namespace twosample
