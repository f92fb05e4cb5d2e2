// Command-line front end: test, curves, null-sim, power-bench, rate-bench.

#include "twosample/bench.hpp"
#include "twosample/calibration.hpp"
#include "twosample/io.hpp"
#include "twosample/parallel.hpp"
#include "twosample/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>

namespace ts = twosample;

namespace {

const std::map<std::string, ts::OutputFormat> kFormats{
    {"csv", ts::OutputFormat::kCsv}, {"json", ts::OutputFormat::kJson}};

const std::map<std::string, ts::Calibration> kCalibrations{
    {"perm", ts::Calibration::kPermutation},
    {"asymp", ts::Calibration::kAsymptotic}};

// Writes to --out when given, else stdout.
void emit(const std::string& out, const std::function<void(std::ostream&)>& fn) {
  if (out.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream file(out);
  if (!file) throw std::runtime_error("cannot write " + out);
  fn(file);
}

ts::Generator generator_named(const std::string& name) {
  const auto g = ts::parse_generator(name);
  if (!g) throw std::invalid_argument("unknown generator '" + name + "'");
  return *g;
}

void add_statistic_options(CLI::App* cmd, ts::StatisticSpec& spec,
                           std::optional<double>& gamma) {
  cmd->add_option("--p", spec.p, "Ground-cost exponent (wasserstein, sinkhorn)")
      ->capture_default_str();
  cmd->add_option("--lambda", spec.lambda, "Entropic regularization (sinkhorn)")
      ->capture_default_str();
  cmd->add_option("--gamma", gamma,
                  "Gaussian kernel bandwidth (mmd); median heuristic if unset");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric two-sample tests"};
  app.set_config("--config", "", "TOML/INI config file; flags override");
  app.require_subcommand(1);

  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = default)")
      ->envname(ts::kThreadsEnvVar);

  // test
  ts::RunConfig run;
  std::optional<double> test_gamma;
  auto* test = app.add_subcommand("test", "Run a calibrated two-sample test");
  test->add_option("--x", run.x_path, "CSV of the first sample")
      ->required()
      ->check(CLI::ExistingFile);
  test->add_option("--y", run.y_path, "CSV of the second sample")
      ->required()
      ->check(CLI::ExistingFile);
  test->add_option("--stat", run.statistic.name, "Statistic name")
      ->capture_default_str();
  add_statistic_options(test, run.statistic, test_gamma);
  test->add_option("--alpha", run.alpha, "Significance level")
      ->capture_default_str();
  test->add_option("--perms", run.permutations, "Permutation resamples")
      ->capture_default_str();
  test->add_option("--seed", run.seed, "Random seed")->capture_default_str();
  test->add_option("--calib", run.calibration, "Calibration")
      ->transform(CLI::CheckedTransformer(kCalibrations, CLI::ignore_case));
  test->add_option("--out", run.out, "Report path (default stdout)");
  test->add_option("--format", run.format, "Report format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  test->add_option("--table", run.table_path,
                   "Bridge quantile table CSV for --calib asymp")
      ->check(CLI::ExistingFile);
  test->add_option("--paths", run.paths, "Bridge paths when simulating")
      ->capture_default_str();
  test->add_option("--grid", run.grid, "Bridge grid size")
      ->capture_default_str();

  // curves
  std::string curves_x, curves_y, curves_out;
  ts::OutputFormat curves_format = ts::OutputFormat::kCsv;
  auto* curves = app.add_subcommand("curves", "Export PP, QQ, ROC and ODC curves");
  curves->add_option("--x", curves_x, "CSV of the first sample")
      ->required()
      ->check(CLI::ExistingFile);
  curves->add_option("--y", curves_y, "CSV of the second sample")
      ->required()
      ->check(CLI::ExistingFile);
  curves->add_option("--out", curves_out, "Output directory")->required();
  curves->add_option("--format", curves_format, "csv (one file per curve) or json")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  // null-sim
  std::string null_kind = "bridge_l2";
  std::size_t null_paths = 100000;
  std::size_t null_grid = 2048;
  std::uint64_t null_seed = 0;
  std::string null_out;
  ts::OutputFormat null_format = ts::OutputFormat::kCsv;
  auto* null_sim =
      app.add_subcommand("null-sim", "Simulate a Brownian-bridge quantile table");
  null_sim->add_option("--kind", null_kind,
                       "bridge_sup, bridge_l2, odc_bridge_sup or odc_bridge_l2")
      ->capture_default_str();
  null_sim->add_option("--paths", null_paths, "Number of paths")
      ->capture_default_str();
  null_sim->add_option("--grid", null_grid, "Grid size")->capture_default_str();
  null_sim->add_option("--seed", null_seed, "Random seed")->capture_default_str();
  null_sim->add_option("--out", null_out, "Output path (default stdout)");
  null_sim->add_option("--format", null_format,
                       "csv (full table) or json (summary)")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  // power-bench
  ts::PowerBenchConfig power;
  std::vector<std::string> power_stats{"energy", "mmd"};
  std::string power_base = "gaussian";
  std::string power_shift = "mean";
  ts::StatisticSpec power_params;
  std::optional<double> power_gamma;
  std::string power_out;
  ts::OutputFormat power_format = ts::OutputFormat::kCsv;
  auto* power_cmd =
      app.add_subcommand("power-bench", "Empirical rejection rates");
  power_cmd->add_option("--stat", power_stats, "Statistics")
      ->delimiter(',')
      ->capture_default_str();
  add_statistic_options(power_cmd, power_params, power_gamma);
  power_cmd->add_option("--base", power_base,
                        "uniform, exponential, logit or gaussian")
      ->capture_default_str();
  power_cmd->add_option("--shift", power_shift, "mean or scale")
      ->capture_default_str();
  power_cmd->add_option("--delta", power.delta, "Shift size")
      ->capture_default_str();
  power_cmd->add_option("--dims", power.dims, "Dimensions")
      ->delimiter(',')
      ->capture_default_str();
  power_cmd->add_option("--sizes", power.sizes, "Sample sizes (n = m)")
      ->delimiter(',')
      ->capture_default_str();
  power_cmd->add_option("--trials", power.trials, "Trials per cell")
      ->capture_default_str();
  power_cmd->add_option("--alpha", power.alpha, "Significance level")
      ->capture_default_str();
  power_cmd->add_option("--perms", power.permutations, "Permutation resamples")
      ->capture_default_str();
  power_cmd->add_option("--seed", power.seed, "Random seed")
      ->capture_default_str();
  power_cmd->add_option("--out", power_out, "Output path (default stdout)");
  power_cmd->add_option("--format", power_format, "Table format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  // rate-bench
  ts::RateBenchConfig rate;
  std::string rate_generator = "uniform";
  std::string rate_out;
  ts::OutputFormat rate_format = ts::OutputFormat::kCsv;
  auto* rate_cmd = app.add_subcommand(
      "rate-bench", "Mean W_p between same-law samples versus n");
  rate_cmd->add_option("--dims", rate.dims, "Dimensions (1..4)")
      ->delimiter(',')
      ->capture_default_str();
  rate_cmd->add_option("--sizes", rate.sizes, "Sample sizes (n = m)")
      ->delimiter(',')
      ->capture_default_str();
  rate_cmd->add_option("--trials", rate.trials, "Trials per cell")
      ->capture_default_str();
  rate_cmd->add_option("--generator", rate_generator, "Sampling law")
      ->capture_default_str();
  rate_cmd->add_option("--p", rate.p, "Ground-cost exponent")
      ->capture_default_str();
  rate_cmd->add_option("--seed", rate.seed, "Random seed")->capture_default_str();
  rate_cmd->add_option("--out", rate_out, "Output path (default stdout)");
  rate_cmd->add_option("--format", rate_format, "Table format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  CLI11_PARSE(app, argc, argv);

  try {
    if (test->parsed()) {
      run.command = ts::Command::kTest;
      run.statistic.gamma = test_gamma;
      run.threads = threads;
      const auto report = ts::run_test(run);
      emit(run.out, [&](std::ostream& os) {
        ts::write_report(os, report, run.format);
      });
    } else if (curves->parsed()) {
      const auto set = ts::compute_curves(ts::ingest(curves_x), ts::ingest(curves_y));
      for (const auto& path : ts::export_curves(set, curves_out, curves_format)) {
        std::cout << path.string() << '\n';
      }
    } else if (null_sim->parsed()) {
      const auto kind = ts::parse_null_kind(null_kind);
      if (!kind || *kind == ts::NullKind::kPermutation) {
        throw std::invalid_argument("unknown bridge kind '" + null_kind + "'");
      }
      ts::NullModel{*kind, null_paths, null_seed, null_grid}.validate();
      const auto table = ts::simulate_bridge_functional(*kind, null_paths,
                                                        null_grid, null_seed, threads);
      emit(null_out, [&](std::ostream& os) {
        if (null_format == ts::OutputFormat::kCsv) {
          table.write_csv(os);
          return;
        }
        nlohmann::json j{{"kind", ts::to_string(*kind)},
                         {"paths", null_paths},
                         {"grid", null_grid},
                         {"seed", null_seed},
                         {"mean", table.mean()}};
        for (double a : {0.9, 0.95, 0.99}) {
          j["quantiles"].push_back({{"alpha", a}, {"quantile", table.quantile(a)}});
        }
        os << j.dump(2) << '\n';
      });
    } else if (power_cmd->parsed()) {
      power.base = generator_named(power_base);
      const auto shift = ts::parse_shift_kind(power_shift);
      if (!shift) throw std::invalid_argument("unknown shift '" + power_shift + "'");
      power.shift = *shift;
      power.threads = threads;
      for (const auto& name : power_stats) {
        ts::StatisticSpec spec = power_params;
        spec.name = name;
        spec.gamma = power_gamma;
        power.statistics.push_back(spec);
      }
      const auto rows = ts::power_bench(power);
      emit(power_out, [&](std::ostream& os) {
        ts::write_power_table(os, rows, power_format);
      });
    } else if (rate_cmd->parsed()) {
      rate.generator = generator_named(rate_generator);
      rate.threads = threads;
      const auto result = ts::rate_bench(rate);
      emit(rate_out, [&](std::ostream& os) {
        ts::write_rate_table(os, result, rate_format);
      });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
