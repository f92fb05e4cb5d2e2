#pragma once

#include "twosample/calibration.hpp"
#include "twosample/empirical.hpp"
#include "twosample/report.hpp"
#include "twosample/sample.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace twosample {

/// A statistic selected by name, with its parameters.
///
/// Names: ks, pp_l2, qq_l2, qq_linf, wasserstein, wasserstein_inf, odc_w2,
/// odc_linf (1-D), energy, mmd, sinkhorn (any dimension).
struct StatisticSpec {
  std::string name = "ks";
  double p = 1.0;
  double lambda = 0.0;
  std::optional<double> gamma;  // mmd bandwidth; median heuristic if unset

  bool is_univariate() const;
  std::optional<UnivariateKind> univariate_kind() const;
  nlohmann::json parameters() const;
};

/// Throws std::invalid_argument for unknown names or bad parameters.
void validate(const StatisticSpec& spec);

struct Evaluation {
  double raw = 0.0;
  double scale = 1.0;

  double scaled() const { return raw * scale; }
};

Evaluation evaluate(const StatisticSpec& spec, const Sample& x, const Sample& y);

/// Permutation calibration of the scaled statistic. Energy distance and MMD
/// go through precomputed pairwise block sums; the MMD bandwidth is fixed
/// from the pooled sample so it is identical across relabelings.
PermutationResult permutation_calibrate(const StatisticSpec& spec,
                                        const Sample& x, const Sample& y,
                                        std::size_t resamples,
                                        std::uint64_t seed,
                                        std::size_t threads = 0);

enum class Command { kTest, kCurves, kNullSim, kPowerBench, kRateBench };
enum class OutputFormat { kCsv, kJson };
enum class Calibration { kPermutation, kAsymptotic };

struct RunConfig {
  Command command = Command::kTest;
  std::string x_path;
  std::string y_path;
  StatisticSpec statistic;
  double alpha = 0.05;
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
  Calibration calibration = Calibration::kPermutation;
  std::string out;
  OutputFormat format = OutputFormat::kJson;
  // asymptotic calibration: bridge table from file, or simulated
  std::string table_path;
  std::size_t paths = 100000;
  std::size_t grid = 2048;
  std::size_t threads = 0;

  /// Echo embedded in reports; excludes the thread count, which never
  /// changes results.
  nlohmann::json echo() const;
};

TestReport run_test(const RunConfig& config, const Sample& x, const Sample& y);
/// Reads x_path and y_path, then runs the test.
TestReport run_test(const RunConfig& config);

void write_report(std::ostream& os, const TestReport& report,
                  OutputFormat format);

/// Row of a PP curve: F_n ranges over [t_lo, t_hi] while G_m equals value.
/// Rows with t_lo == t_hi are the vertical moves at Y points.
struct PpRow {
  double t_lo;
  double t_hi;
  double value;
};

/// Row of a QQ curve: both quantile functions are constant on (t_lo, t_hi].
struct QqRow {
  double t_lo;
  double t_hi;
  double x_quantile;
  double y_quantile;
};

struct CurveSet {
  std::vector<PpRow> pp;
  std::vector<QqRow> qq;
  StepFunction roc;
  StepFunction odc;
  double auc = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
};

/// Requires 1-D samples.
CurveSet compute_curves(const Sample& x, const Sample& y);

/// Writes pp.csv, qq.csv, roc.csv, odc.csv and summary.json into `dir`
/// (CSV), or a single curves.json (JSON). Returns the written paths.
std::vector<std::filesystem::path> export_curves(
    const CurveSet& curves, const std::filesystem::path& dir,
    OutputFormat format);

nlohmann::json curves_to_json(const CurveSet& curves);

}  // namespace twosample
