#include "twosample/bench.hpp"

#include "twosample/parallel.hpp"
#include "twosample/transport.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace twosample {
namespace {

Sample draw_sample(Generator g, std::size_t n, std::size_t d,
                   std::mt19937_64& rng) {
  PointMatrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index k = 0; k < points.cols(); ++k) points(i, k) = draw(g, rng);
  }
  return Sample(std::move(points));
}

Sample shifted(Sample s, ShiftKind shift, double delta) {
  PointMatrix points = s.points();
  if (shift == ShiftKind::kMean) {
    points.col(0).array() += delta;
  } else {
    points *= 1.0 + delta;
  }
  return Sample(std::move(points));
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t d, std::size_t n) {
  return substream_seed(substream_seed(seed, d), n);
}

}  // namespace

std::optional<ShiftKind> parse_shift_kind(std::string_view name) {
  if (name == "mean") return ShiftKind::kMean;
  if (name == "scale") return ShiftKind::kScale;
  return std::nullopt;
}

std::string_view to_string(ShiftKind kind) {
  return kind == ShiftKind::kMean ? "mean" : "scale";
}

std::vector<PowerRow> power_bench(const PowerBenchConfig& config) {
  if (config.statistics.empty()) {
    throw std::invalid_argument("power bench needs at least one statistic");
  }
  if (config.trials == 0) throw std::invalid_argument("trials must be > 0");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  if (config.shift == ShiftKind::kScale && !(config.delta > -1.0)) {
    throw std::invalid_argument("scale shift needs delta > -1");
  }
  for (const auto& spec : config.statistics) {
    validate(spec);
    if (spec.is_univariate() &&
        std::any_of(config.dims.begin(), config.dims.end(),
                    [](std::size_t d) { return d != 1; })) {
      throw std::invalid_argument("statistic '" + spec.name +
                                  "' needs d = 1");
    }
  }

  std::vector<PowerRow> rows;
  const std::size_t num_stats = config.statistics.size();
  for (std::size_t d : config.dims) {
    if (d == 0) throw std::invalid_argument("dimension must be > 0");
    for (std::size_t n : config.sizes) {
      if (n < 2) throw std::invalid_argument("sample size must be >= 2");
      const std::uint64_t base_seed = cell_seed(config.seed, d, n);
      // rejects[t * num_stats + s]; the same data feed every statistic
      std::vector<char> rejects(config.trials * num_stats, 0);
      parallel_for(
          config.trials,
          [&](std::size_t t) {
            const std::uint64_t trial_seed = substream_seed(base_seed, t);
            std::mt19937_64 rng(trial_seed);
            const Sample x = draw_sample(config.base, n, d, rng);
            const Sample y = shifted(draw_sample(config.base, n, d, rng),
                                     config.shift, config.delta);
            const std::uint64_t perm_seed = substream_seed(trial_seed, 1);
            for (std::size_t s = 0; s < num_stats; ++s) {
              const auto result =
                  permutation_calibrate(config.statistics[s], x, y,
                                        config.permutations, perm_seed, 1);
              rejects[t * num_stats + s] = result.p_value <= config.alpha;
            }
          },
          config.threads);
      for (std::size_t s = 0; s < num_stats; ++s) {
        PowerRow row{config.statistics[s].name, n, d, config.delta,
                     config.trials, 0};
        for (std::size_t t = 0; t < config.trials; ++t) {
          row.rejections += rejects[t * num_stats + s] ? 1 : 0;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::pair<double, double> loglog_fit(std::span<const double> x,
                                     std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("size mismatch");
  if (x.size() < 3) {
    throw std::invalid_argument("need ≥ 3 grid points for slope");
  }
  const auto k = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("log-log fit needs positive values");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("need ≥ 3 grid points for slope");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

RateBenchResult rate_bench(const RateBenchConfig& config) {
  std::vector<std::size_t> sizes = config.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.size() < 3) {
    throw std::invalid_argument("need ≥ 3 grid points for slope");
  }
  if (sizes.back() > kExactLpBudget) {
    throw std::invalid_argument(
        "n = " + std::to_string(sizes.back()) + " exceeds the exact-LP budget (" +
        std::to_string(kExactLpBudget) + "); use a smaller grid");
  }
  if (sizes.front() < 2) throw std::invalid_argument("sample size must be >= 2");
  for (std::size_t d : config.dims) {
    if (d < 1 || d > 4) throw std::invalid_argument("rate bench needs d in 1..4");
  }
  if (config.trials < 2) throw std::invalid_argument("rate bench needs >= 2 trials");
  if (!(config.p >= 1.0)) throw std::invalid_argument("p must be >= 1");

  RateBenchResult result;
  for (std::size_t d : config.dims) {
    std::vector<double> ns;
    std::vector<double> means;
    for (std::size_t n : sizes) {
      const std::uint64_t base_seed = cell_seed(config.seed, d, n);
      std::vector<double> values(config.trials);
      parallel_for(
          config.trials,
          [&](std::size_t t) {
            std::mt19937_64 rng(substream_seed(base_seed, t));
            const Sample x = draw_sample(config.generator, n, d, rng);
            const Sample y = draw_sample(config.generator, n, d, rng);
            const double cost =
                exact_wasserstein_lp(cost_matrix(x, y, config.p)).optimum;
            values[t] = std::pow(std::max(cost, 0.0), 1.0 / config.p);
          },
          config.threads);
      const auto k = static_cast<double>(values.size());
      const double mean = std::accumulate(values.begin(), values.end(), 0.0) / k;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      result.rows.push_back({d, n, mean, std::sqrt(ss / (k - 1.0) / k)});
      ns.push_back(static_cast<double>(n));
      means.push_back(mean);
    }
    const auto [slope, intercept] = loglog_fit(ns, means);
    RateFit fit{d, slope, intercept, std::nullopt};
    if (d == 1) fit.reference_slope = -0.5;
    if (d >= 3) fit.reference_slope = -1.0 / static_cast<double>(d);
    result.fits.push_back(fit);
  }
  return result;
}

void write_power_table(std::ostream& os, std::span<const PowerRow> rows,
                       OutputFormat format) {
  if (format == OutputFormat::kJson) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      j.push_back({{"statistic", r.statistic},
                   {"n", r.n},
                   {"d", r.d},
                   {"delta", r.delta},
                   {"trials", r.trials},
                   {"rejections", r.rejections},
                   {"rate", r.rate()}});
    }
    os << j.dump(2) << '\n';
    return;
  }
  os << "statistic,n,d,delta,trials,rejections,rate\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.statistic << ',' << r.n << ',' << r.d << ',' << r.delta << ','
       << r.trials << ',' << r.rejections << ',' << r.rate() << '\n';
  }
}

void write_rate_table(std::ostream& os, const RateBenchResult& result,
                      OutputFormat format) {
  const auto fit_for = [&](std::size_t d) -> const RateFit& {
    return *std::find_if(result.fits.begin(), result.fits.end(),
                         [d](const RateFit& f) { return f.d == d; });
  };
  if (format == OutputFormat::kJson) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : result.rows) {
      rows.push_back(
          {{"d", r.d}, {"n", r.n}, {"mean", r.mean}, {"std_error", r.std_error}});
    }
    nlohmann::json fits = nlohmann::json::array();
    for (const auto& f : result.fits) {
      fits.push_back({{"d", f.d},
                      {"slope", f.slope},
                      {"intercept", f.intercept},
                      {"reference_slope", f.reference_slope
                                              ? nlohmann::json(*f.reference_slope)
                                              : nlohmann::json(nullptr)}});
    }
    os << nlohmann::json{{"rows", rows}, {"fits", fits}}.dump(2) << '\n';
    return;
  }
  os << "d,n,mean,std_error,slope,reference_slope\n" << std::setprecision(17);
  for (const auto& r : result.rows) {
    const auto& f = fit_for(r.d);
    os << r.d << ',' << r.n << ',' << r.mean << ',' << r.std_error << ','
       << f.slope << ',';
    if (f.reference_slope) os << *f.reference_slope;
    os << '\n';
  }
}

}  // namespace twosample
