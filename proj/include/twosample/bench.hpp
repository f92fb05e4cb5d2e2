#pragma once

#include "twosample/calibration.hpp"
#include "twosample/runner.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace twosample {

/// How the second sample departs from the first.
enum class ShiftKind { kMean, kScale };

std::optional<ShiftKind> parse_shift_kind(std::string_view name);
std::string_view to_string(ShiftKind kind);

/// Empirical rejection rates of permutation-calibrated tests. X has iid
/// coordinates from `base`; Y is X's law with the first coordinate shifted
/// by delta (kMean) or every coordinate scaled by 1 + delta (kScale).
struct PowerBenchConfig {
  Generator base = Generator::kGaussian;
  ShiftKind shift = ShiftKind::kMean;
  double delta = 0.0;
  std::vector<std::size_t> dims{1};
  std::vector<std::size_t> sizes{25, 50, 100, 200};
  std::vector<StatisticSpec> statistics;
  std::size_t trials = 200;
  double alpha = 0.05;
  std::size_t permutations = 199;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct PowerRow {
  std::string statistic;
  std::size_t n = 0;
  std::size_t d = 0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t rejections = 0;

  double rate() const {
    return static_cast<double>(rejections) / static_cast<double>(trials);
  }
};

std::vector<PowerRow> power_bench(const PowerBenchConfig& config);

/// Largest sample size solved by the exact transport LP in the rate bench.
inline constexpr std::size_t kExactLpBudget = 256;

/// Mean W_p(P_n, Q_n) for two independent samples of the same law.
struct RateBenchConfig {
  std::vector<std::size_t> dims{1, 2, 3};
  std::vector<std::size_t> sizes{32, 64, 128, 256};
  std::size_t trials = 200;
  Generator generator = Generator::kUniform;
  double p = 1.0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct RateRow {
  std::size_t d = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct RateFit {
  std::size_t d = 0;
  double slope = 0.0;
  double intercept = 0.0;
  /// -1/2 for d = 1, -1/d for d >= 3; none for d = 2 where the rate carries
  /// a log factor.
  std::optional<double> reference_slope;
};

struct RateBenchResult {
  std::vector<RateRow> rows;
  std::vector<RateFit> fits;
};

RateBenchResult rate_bench(const RateBenchConfig& config);

/// Least-squares slope and intercept of log(y) against log(x).
std::pair<double, double> loglog_fit(std::span<const double> x,
                                     std::span<const double> y);

void write_power_table(std::ostream& os, std::span<const PowerRow> rows,
                       OutputFormat format);
void write_rate_table(std::ostream& os, const RateBenchResult& result,
                      OutputFormat format);

}  // namespace twosample
