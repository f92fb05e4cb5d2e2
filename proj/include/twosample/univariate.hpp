#pragma once

#include "twosample/empirical.hpp"
#include "twosample/sample.hpp"

#include <optional>
#include <string_view>

namespace twosample {

enum class UnivariateKind {
  kKs,
  kPpL2,
  kQqL2,
  kQqLinf,
  kWassersteinP,
  kWassersteinInf,
  kOdcW2,
  kOdcLinf,
};

std::string_view to_string(UnivariateKind kind);
std::optional<UnivariateKind> parse_univariate_kind(std::string_view name);

/// A 1-D statistic. `raw` is the unscaled discrepancy and `scale` the
/// sample-size factor (mn/(m+n), its square root, or 1); the two are kept
/// apart so no caller scales twice.
struct UnivariateStatistic {
  UnivariateKind kind;
  double raw = 0.0;
  double scale = 1.0;
  double p = 1.0;  // only meaningful for kWassersteinP

  double scaled() const { return raw * scale; }
};

/// mn/(m+n)
double linear_scale(std::size_t n, std::size_t m);
/// sqrt(mn/(m+n))
double root_scale(std::size_t n, std::size_t m);

/// sqrt(mn/(m+n)) sup_x |F_n(x) - G_m(x)|, exact over the pooled points.
UnivariateStatistic ks_statistic(const EmpiricalDistribution& x,
                                 const EmpiricalDistribution& y);

/// mn/(m+n) times the integral of (F_n - G_m)^2 over [min, max] of the
/// pooled sample.
UnivariateStatistic pp_l2_statistic(const EmpiricalDistribution& x,
                                    const EmpiricalDistribution& y);

/// W_p^p = int_0^1 |F_n^{-1} - G_m^{-1}|^p dt over the common refinement of
/// {k/n} and {k/m}. Returned unscaled; W_p is raw^(1/p).
UnivariateStatistic wasserstein_1d(const EmpiricalDistribution& x,
                                   const EmpiricalDistribution& y, double p);

/// sup_t |F_n^{-1}(t) - G_m^{-1}(t)|.
UnivariateStatistic wasserstein_inf_1d(const EmpiricalDistribution& x,
                                       const EmpiricalDistribution& y);

/// mn/(m+n) * W_2^2.
UnivariateStatistic qq_l2_statistic(const EmpiricalDistribution& x,
                                    const EmpiricalDistribution& y);

/// sqrt(mn/(m+n)) * W_inf.
UnivariateStatistic qq_linf_statistic(const EmpiricalDistribution& x,
                                      const EmpiricalDistribution& y);

/// mn/(m+n) int_0^1 (G_m(F_n^{-1}(t)) - t)^2 dt, integrated in closed form.
UnivariateStatistic odc_w2_statistic(const EmpiricalDistribution& x,
                                     const EmpiricalDistribution& y);

/// sqrt(mn/(m+n)) sup_t |G_m(F_n^{-1}(t)) - t|.
UnivariateStatistic odc_linf_statistic(const EmpiricalDistribution& x,
                                       const EmpiricalDistribution& y);

/// Dispatch by kind; `p` is used only by kWassersteinP.
UnivariateStatistic univariate_statistic(UnivariateKind kind,
                                         const EmpiricalDistribution& x,
                                         const EmpiricalDistribution& y,
                                         double p = 1.0);

// Sample overloads. Both samples must be 1-D.
UnivariateStatistic ks_statistic(const Sample& x, const Sample& y);
UnivariateStatistic pp_l2_statistic(const Sample& x, const Sample& y);
UnivariateStatistic wasserstein_1d(const Sample& x, const Sample& y, double p);
UnivariateStatistic wasserstein_inf_1d(const Sample& x, const Sample& y);
UnivariateStatistic qq_l2_statistic(const Sample& x, const Sample& y);
UnivariateStatistic qq_linf_statistic(const Sample& x, const Sample& y);
UnivariateStatistic odc_w2_statistic(const Sample& x, const Sample& y);
UnivariateStatistic odc_linf_statistic(const Sample& x, const Sample& y);
UnivariateStatistic univariate_statistic(UnivariateKind kind, const Sample& x,
                                         const Sample& y, double p = 1.0);

}  // namespace twosample
