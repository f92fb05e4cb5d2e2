#pragma once

#include "twosample/multivariate.hpp"
#include "twosample/sample.hpp"
#include "twosample/univariate.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace twosample {

enum class NullKind {
  kPermutation,
  kBridgeSup,
  kBridgeL2,
  kOdcBridgeL2,
  kOdcBridgeSup,
};

std::string_view to_string(NullKind kind);
std::optional<NullKind> parse_null_kind(std::string_view name);

/// How a null distribution is produced.
struct NullModel {
  NullKind kind = NullKind::kPermutation;
  std::size_t resamples_or_paths = 999;
  std::uint64_t seed = 0;
  std::size_t grid_size = 2048;  // bridge kinds only

  /// Throws std::invalid_argument on < 100 resamples/paths or a bridge grid
  /// coarser than 1000.
  void validate() const;

  bool operator==(const NullModel&) const = default;
};

using StatisticFn = std::function<double(const Sample&, const Sample&)>;

struct PermutationResult {
  double observed = 0.0;
  double p_value = 1.0;
  std::size_t exceedances = 0;  // #{b : T_b >= T_obs}
  std::size_t resamples = 0;
};

inline constexpr std::size_t kMinResamples = 100;

/// Permutation test on a pooled sample whose first n rows are X and last m
/// rows are Y. Relabeling b draws a uniform permutation from the stream
/// substream_seed(seed, b); p = (1 + #{T_b >= T_obs}) / (B + 1).
PermutationResult permutation_test(const Sample& pooled, std::size_t n,
                                   std::size_t m, const StatisticFn& statistic,
                                   std::size_t resamples, std::uint64_t seed,
                                   std::size_t threads = 0);

double permutation_pvalue(const Sample& pooled, std::size_t n, std::size_t m,
                          const StatisticFn& statistic, std::size_t resamples,
                          std::uint64_t seed, std::size_t threads = 0);

/// Same relabelings as permutation_test, evaluated through precomputed
/// pairwise block sums (energy distance, MMD).
PermutationResult permutation_test(const PairwiseForm& form, std::size_t n,
                                   std::size_t m, std::size_t resamples,
                                   std::uint64_t seed, std::size_t threads = 0);

/// Sorted Monte Carlo draws of a Brownian-bridge functional.
class QuantileTable {
 public:
  QuantileTable(NullKind kind, std::vector<double> values);

  NullKind kind() const { return kind_; }
  std::span<const double> values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

  /// Empirical alpha-quantile, 0 < alpha <= 1.
  double quantile(double alpha) const;
  /// (1 + #{v >= x}) / (N + 1).
  double upper_tail_pvalue(double x) const;
  double mean() const;

  /// `alpha,quantile` rows; lossless (one row per draw).
  void write_csv(std::ostream& os) const;
  static QuantileTable read_csv(std::istream& is, NullKind kind);

 private:
  NullKind kind_;
  std::vector<double> sorted_;
};

/// Simulates B(t) = W(t) - t W(1) on a uniform grid and records sup|B|
/// (max over grid) or int B^2 (trapezoidal rule).
QuantileTable simulate_bridge_functional(NullKind kind, std::size_t num_paths,
                                         std::size_t grid_size,
                                         std::uint64_t seed,
                                         std::size_t threads = 0);

/// The limiting functional each distribution-free statistic is calibrated
/// against, or nullopt when the limit depends on the unknown distribution.
std::optional<NullKind> asymptotic_null_for(UnivariateKind kind);

/// p-value of the scaled statistic against a simulated table.
double asymptotic_pvalue(const UnivariateStatistic& statistic,
                         const QuantileTable& table);

/// Continuous, strictly increasing sample generators.
enum class Generator { kUniform, kExponential, kLogit, kGaussian };

std::string_view to_string(Generator g);
std::optional<Generator> parse_generator(std::string_view name);

/// Uniform draw on the open interval (0, 1).
double open_unit(std::mt19937_64& rng);
double draw(Generator g, std::mt19937_64& rng);

/// Simulated null law of `kind` (both samples from the same generator) for
/// each generator, compared pairwise by the two-sample KS distance. Returns
/// the largest discrepancy. Each generator uses its own random streams.
double distribution_free_check(UnivariateKind kind,
                               std::span<const Generator> generators,
                               std::size_t n, std::size_t m,
                               std::size_t trials, std::uint64_t seed,
                               std::size_t threads = 0);

/// Scaled statistic values of `kind` under H0 for one generator.
std::vector<double> simulate_univariate_null(UnivariateKind kind,
                                             Generator generator,
                                             std::size_t n, std::size_t m,
                                             std::size_t trials,
                                             std::uint64_t seed,
                                             std::size_t threads = 0);

}  // namespace twosample
