#include "twosample/univariate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace twosample {
namespace {

constexpr std::array<std::pair<UnivariateKind, std::string_view>, 8> kNames{{
    {UnivariateKind::kKs, "ks"},
    {UnivariateKind::kPpL2, "pp_l2"},
    {UnivariateKind::kQqL2, "qq_l2"},
    {UnivariateKind::kQqLinf, "qq_linf"},
    {UnivariateKind::kWassersteinP, "wasserstein"},
    {UnivariateKind::kWassersteinInf, "wasserstein_inf"},
    {UnivariateKind::kOdcW2, "odc_w2"},
    {UnivariateKind::kOdcLinf, "odc_linf"},
}};

double abs_pow(double d, double p) {
  d = std::abs(d);
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

// Walks the common refinement of the quantile breakpoints {k/n} and {k/m}.
// Positions are integers in units of 1/(nm), so piece lengths are exact.
template <typename Visit>
void for_each_quantile_piece(const EmpiricalDistribution& x,
                             const EmpiricalDistribution& y, Visit&& visit) {
  const std::uint64_t n = x.size();
  const std::uint64_t m = y.size();
  std::uint64_t pos = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m) {
    const std::uint64_t x_end = (i + 1) * m;
    const std::uint64_t y_end = (j + 1) * n;
    const std::uint64_t end = std::min(x_end, y_end);
    visit(x.sorted_values()[i], y.sorted_values()[j], end - pos);
    pos = end;
    if (end == x_end) ++i;
    if (end == y_end) ++j;
  }
}

// Calls visit(f_count, g_count, z, next_z) for each gap between consecutive
// distinct pooled values, where the counts are #{x <= z} and #{y <= z}.
// The final call has next_z == z.
template <typename Visit>
void for_each_pooled_point(const EmpiricalDistribution& x,
                           const EmpiricalDistribution& y, Visit&& visit) {
  const auto xs = x.sorted_values();
  const auto ys = y.sorted_values();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < xs.size() || j < ys.size()) {
    double z;
    if (j == ys.size() || (i < xs.size() && xs[i] <= ys[j])) {
      z = xs[i];
    } else {
      z = ys[j];
    }
    while (i < xs.size() && xs[i] == z) ++i;
    while (j < ys.size() && ys[j] == z) ++j;
    double next = z;
    if (i < xs.size() && j < ys.size()) {
      next = std::min(xs[i], ys[j]);
    } else if (i < xs.size()) {
      next = xs[i];
    } else if (j < ys.size()) {
      next = ys[j];
    }
    visit(i, j, z, next);
  }
}

EmpiricalDistribution empirical_of(const Sample& s) {
  return EmpiricalDistribution(s.values());
}

}  // namespace

std::string_view to_string(UnivariateKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<UnivariateKind> parse_univariate_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

double linear_scale(std::size_t n, std::size_t m) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return dn * dm / (dn + dm);
}

double root_scale(std::size_t n, std::size_t m) {
  return std::sqrt(linear_scale(n, m));
}

UnivariateStatistic ks_statistic(const EmpiricalDistribution& x,
                                 const EmpiricalDistribution& y) {
  const auto n = static_cast<std::int64_t>(x.size());
  const auto m = static_cast<std::int64_t>(y.size());
  std::int64_t best = 0;
  for_each_pooled_point(x, y, [&](std::size_t i, std::size_t j, double,
                                  double) {
    const std::int64_t diff = static_cast<std::int64_t>(i) * m -
                              static_cast<std::int64_t>(j) * n;
    best = std::max(best, diff < 0 ? -diff : diff);
  });
  const double raw = static_cast<double>(best) / static_cast<double>(n * m);
  return {UnivariateKind::kKs, raw, root_scale(x.size(), y.size())};
}

UnivariateStatistic pp_l2_statistic(const EmpiricalDistribution& x,
                                    const EmpiricalDistribution& y) {
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  double integral = 0.0;
  for_each_pooled_point(x, y, [&](std::size_t i, std::size_t j, double z,
                                  double next) {
    const double diff = static_cast<double>(i) / n - static_cast<double>(j) / m;
    integral += diff * diff * (next - z);
  });
  return {UnivariateKind::kPpL2, integral, linear_scale(x.size(), y.size())};
}

UnivariateStatistic wasserstein_1d(const EmpiricalDistribution& x,
                                   const EmpiricalDistribution& y, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("wasserstein exponent p must be >= 1");
  }
  double total = 0.0;
  for_each_quantile_piece(x, y, [&](double xq, double yq, std::uint64_t len) {
    total += abs_pow(xq - yq, p) * static_cast<double>(len);
  });
  const double raw =
      total / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
  return {UnivariateKind::kWassersteinP, raw, 1.0, p};
}

UnivariateStatistic wasserstein_inf_1d(const EmpiricalDistribution& x,
                                       const EmpiricalDistribution& y) {
  double best = 0.0;
  for_each_quantile_piece(x, y, [&](double xq, double yq, std::uint64_t) {
    best = std::max(best, std::abs(xq - yq));
  });
  return {UnivariateKind::kWassersteinInf, best, 1.0};
}

UnivariateStatistic qq_l2_statistic(const EmpiricalDistribution& x,
                                    const EmpiricalDistribution& y) {
  auto w = wasserstein_1d(x, y, 2.0);
  return {UnivariateKind::kQqL2, w.raw, linear_scale(x.size(), y.size())};
}

UnivariateStatistic qq_linf_statistic(const EmpiricalDistribution& x,
                                      const EmpiricalDistribution& y) {
  auto w = wasserstein_inf_1d(x, y);
  return {UnivariateKind::kQqLinf, w.raw, root_scale(x.size(), y.size())};
}

UnivariateStatistic odc_w2_statistic(const EmpiricalDistribution& x,
                                     const EmpiricalDistribution& y) {
  const StepFunction odc = odc_curve(x, y);
  double integral = 0.0;
  for (std::size_t k = 0; k < odc.piece_count(); ++k) {
    // int_a^b (c - t)^2 dt = ((b-c)^3 - (a-c)^3) / 3
    const double c = odc.values()[k];
    const double a = odc.lo(k) - c;
    const double b = odc.hi(k) - c;
    integral += (b - a) * (b * b + a * b + a * a) / 3.0;
  }
  return {UnivariateKind::kOdcW2, integral, linear_scale(x.size(), y.size())};
}

UnivariateStatistic odc_linf_statistic(const EmpiricalDistribution& x,
                                       const EmpiricalDistribution& y) {
  const StepFunction odc = odc_curve(x, y);
  double best = 0.0;
  for (std::size_t k = 0; k < odc.piece_count(); ++k) {
    const double c = odc.values()[k];
    best = std::max({best, std::abs(c - odc.lo(k)), std::abs(c - odc.hi(k))});
  }
  return {UnivariateKind::kOdcLinf, best, root_scale(x.size(), y.size())};
}

UnivariateStatistic univariate_statistic(UnivariateKind kind,
                                         const EmpiricalDistribution& x,
                                         const EmpiricalDistribution& y,
                                         double p) {
  switch (kind) {
    case UnivariateKind::kKs:
      return ks_statistic(x, y);
    case UnivariateKind::kPpL2:
      return pp_l2_statistic(x, y);
    case UnivariateKind::kQqL2:
      return qq_l2_statistic(x, y);
    case UnivariateKind::kQqLinf:
      return qq_linf_statistic(x, y);
    case UnivariateKind::kWassersteinP:
      return wasserstein_1d(x, y, p);
    case UnivariateKind::kWassersteinInf:
      return wasserstein_inf_1d(x, y);
    case UnivariateKind::kOdcW2:
      return odc_w2_statistic(x, y);
    case UnivariateKind::kOdcLinf:
      return odc_linf_statistic(x, y);
  }
  throw std::invalid_argument("unknown univariate statistic");
}

UnivariateStatistic ks_statistic(const Sample& x, const Sample& y) {
  return ks_statistic(empirical_of(x), empirical_of(y));
}
UnivariateStatistic pp_l2_statistic(const Sample& x, const Sample& y) {
  return pp_l2_statistic(empirical_of(x), empirical_of(y));
}
UnivariateStatistic wasserstein_1d(const Sample& x, const Sample& y,
                                   double p) {
  return wasserstein_1d(empirical_of(x), empirical_of(y), p);
}
UnivariateStatistic wasserstein_inf_1d(const Sample& x, const Sample& y) {
  return wasserstein_inf_1d(empirical_of(x), empirical_of(y));
}
UnivariateStatistic qq_l2_statistic(const Sample& x, const Sample& y) {
  return qq_l2_statistic(empirical_of(x), empirical_of(y));
}
UnivariateStatistic qq_linf_statistic(const Sample& x, const Sample& y) {
  return qq_linf_statistic(empirical_of(x), empirical_of(y));
}
UnivariateStatistic odc_w2_statistic(const Sample& x, const Sample& y) {
  return odc_w2_statistic(empirical_of(x), empirical_of(y));
}
UnivariateStatistic odc_linf_statistic(const Sample& x, const Sample& y) {
  return odc_linf_statistic(empirical_of(x), empirical_of(y));
}
UnivariateStatistic univariate_statistic(UnivariateKind kind, const Sample& x,
                                         const Sample& y, double p) {
  return univariate_statistic(kind, empirical_of(x), empirical_of(y), p);
}

}  // namespace twosample
