#include "twosample/runner.hpp"

#include "twosample/io.hpp"
#include "twosample/multivariate.hpp"
#include "twosample/univariate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace twosample {
namespace {

constexpr std::string_view kEnergy = "energy";
constexpr std::string_view kMmd = "mmd";
constexpr std::string_view kSinkhorn = "sinkhorn";

bool is_multivariate_name(std::string_view name) {
  return name == kEnergy || name == kMmd || name == kSinkhorn;
}

// The MMD bandwidth every evaluation of `spec` on this pooled data uses.
double resolved_gamma(const StatisticSpec& spec, const Sample& x,
                      const Sample& y) {
  return spec.gamma ? *spec.gamma : median_heuristic_bandwidth(x, y);
}

StatisticSpec resolve(StatisticSpec spec, const Sample& x, const Sample& y) {
  if (spec.name == kMmd) spec.gamma = resolved_gamma(spec, x, y);
  return spec;
}

std::string_view to_string(Calibration c) {
  return c == Calibration::kPermutation ? "perm" : "asymp";
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::kTest:
      return "test";
    case Command::kCurves:
      return "curves";
    case Command::kNullSim:
      return "null-sim";
    case Command::kPowerBench:
      return "power-bench";
    case Command::kRateBench:
      return "rate-bench";
  }
  return "?";
}

EmpiricalDistribution empirical_of(const Sample& s) {
  s.require_univariate();
  return EmpiricalDistribution(s.values());
}

}  // namespace

bool StatisticSpec::is_univariate() const {
  return univariate_kind().has_value();
}

std::optional<UnivariateKind> StatisticSpec::univariate_kind() const {
  return parse_univariate_kind(name);
}

nlohmann::json StatisticSpec::parameters() const {
  nlohmann::json j = nlohmann::json::object();
  const auto kind = univariate_kind();
  if (kind == UnivariateKind::kWassersteinP) j["p"] = p;
  if (kind == UnivariateKind::kPpL2) j["pp_domain"] = "pooled_range";
  if (name == kMmd) {
    j["kernel"] = "gaussian";
    if (gamma) j["gamma"] = *gamma;
  }
  if (name == kSinkhorn) {
    j["p"] = p;
    j["lambda"] = lambda;
  }
  return j;
}

void validate(const StatisticSpec& spec) {
  if (!spec.is_univariate() && !is_multivariate_name(spec.name)) {
    throw std::invalid_argument("unknown statistic '" + spec.name + "'");
  }
  if (!std::isfinite(spec.p) || spec.p < 1.0) {
    throw std::invalid_argument("p must be >= 1");
  }
  if (!std::isfinite(spec.lambda) || spec.lambda < 0.0) {
    throw std::invalid_argument("lambda must be >= 0");
  }
  if (spec.gamma && !(*spec.gamma > 0.0 && std::isfinite(*spec.gamma))) {
    throw std::invalid_argument("kernel bandwidth gamma must be > 0");
  }
}

Evaluation evaluate(const StatisticSpec& spec, const Sample& x,
                    const Sample& y) {
  validate(spec);
  if (const auto kind = spec.univariate_kind()) {
    const auto s = univariate_statistic(*kind, x, y, spec.p);
    return {s.raw, s.scale};
  }
  if (spec.name == kEnergy) return {energy_distance(x, y).value, 1.0};
  if (spec.name == kMmd) {
    return {mmd2(x, y, gaussian_kernel(resolved_gamma(spec, x, y))).value, 1.0};
  }
  return {smoothed_wasserstein_statistic(x, y, spec.p, spec.lambda).value, 1.0};
}

PermutationResult permutation_calibrate(const StatisticSpec& spec,
                                        const Sample& x, const Sample& y,
                                        std::size_t resamples,
                                        std::uint64_t seed,
                                        std::size_t threads) {
  validate(spec);
  require_same_dim(x, y);
  const Sample pooled = concatenate(x, y);
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  if (spec.name == kEnergy) {
    return permutation_test(energy_pairwise_form(pooled), n, m, resamples, seed,
                            threads);
  }
  if (spec.name == kMmd) {
    const auto kernel = gaussian_kernel(resolved_gamma(spec, x, y));
    return permutation_test(mmd_pairwise_form(pooled, kernel), n, m, resamples,
                            seed, threads);
  }
  const StatisticSpec fixed = resolve(spec, x, y);
  const StatisticFn fn = [&fixed](const Sample& a, const Sample& b) {
    return evaluate(fixed, a, b).scaled();
  };
  return permutation_test(pooled, n, m, fn, resamples, seed, threads);
}

nlohmann::json RunConfig::echo() const {
  nlohmann::json j;
  j["command"] = to_string(command);
  j["x"] = x_path;
  j["y"] = y_path;
  j["stat"] = statistic.name;
  j["p"] = statistic.p;
  j["lambda"] = statistic.lambda;
  j["gamma"] = statistic.gamma ? nlohmann::json(*statistic.gamma) : nullptr;
  j["alpha"] = alpha;
  j["perms"] = permutations;
  j["seed"] = seed;
  j["calib"] = to_string(calibration);
  j["format"] = format == OutputFormat::kCsv ? "csv" : "json";
  j["out"] = out;
  j["table"] = table_path;
  j["paths"] = paths;
  j["grid"] = grid;
  return j;
}

TestReport run_test(const RunConfig& config, const Sample& x, const Sample& y) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  validate(config.statistic);
  require_same_dim(x, y);
  const StatisticSpec spec = resolve(config.statistic, x, y);

  TestReport report;
  report.statistic = spec.name;
  report.parameters = spec.parameters();
  report.alpha = config.alpha;
  report.n = x.size();
  report.m = y.size();
  report.config = config.echo();

  const Evaluation value = evaluate(spec, x, y);
  report.raw_value = value.raw;
  report.scaled_value = value.scaled();

  if (config.calibration == Calibration::kPermutation) {
    report.calibration_method = "perm";
    report.null_model = {NullKind::kPermutation, config.permutations,
                         config.seed, config.grid};
    report.null_model.validate();
    report.p_value = permutation_calibrate(spec, x, y, config.permutations,
                                           config.seed, config.threads)
                         .p_value;
    return finalize_report(std::move(report));
  }

  const auto kind = spec.univariate_kind();
  const auto null_kind = kind ? asymptotic_null_for(*kind) : std::nullopt;
  if (!null_kind) {
    throw std::invalid_argument(
        "asymptotic calibration unavailable for '" + spec.name +
        "'; use permutation (--calib perm)");
  }
  report.calibration_method = "asymp";
  const auto table = [&] {
    if (config.table_path.empty()) {
      NullModel model{*null_kind, config.paths, config.seed, config.grid};
      model.validate();
      return simulate_bridge_functional(*null_kind, config.paths, config.grid,
                                        config.seed, config.threads);
    }
    std::ifstream in(config.table_path);
    if (!in) throw std::runtime_error("cannot open " + config.table_path);
    return QuantileTable::read_csv(in, *null_kind);
  }();
  report.null_model = {*null_kind, table.size(), config.seed, config.grid};
  const UnivariateStatistic stat{*kind, value.raw, value.scale, spec.p};
  report.p_value = asymptotic_pvalue(stat, table);
  return finalize_report(std::move(report));
}

TestReport run_test(const RunConfig& config) {
  if (config.x_path.empty() || config.y_path.empty()) {
    throw std::invalid_argument("both --x and --y are required");
  }
  return run_test(config, ingest(config.x_path), ingest(config.y_path));
}

void write_report(std::ostream& os, const TestReport& report,
                  OutputFormat format) {
  const auto j = report_to_json(report);
  if (format == OutputFormat::kJson) {
    os << j.dump(2) << '\n';
    return;
  }
  static constexpr const char* kColumns[] = {
      "schema",     "statistic", "raw_value",  "scaled_value",
      "p_value",    "alpha",     "reject",     "calibration",
      "null_kind",  "resamples_or_paths",      "seed",
      "n",          "m"};
  bool first = true;
  for (const char* c : kColumns) {
    os << (first ? "" : ",") << c;
    first = false;
  }
  os << '\n' << std::setprecision(17);
  first = true;
  for (const char* c : kColumns) {
    os << (first ? "" : ",");
    first = false;
    const auto& v = j.at(c);
    if (v.is_string()) {
      os << v.get<std::string>();
    } else {
      os << v.dump();
    }
  }
  os << '\n';
}

CurveSet compute_curves(const Sample& x, const Sample& y) {
  const auto fx = empirical_of(x);
  const auto gy = empirical_of(y);
  const std::size_t n = fx.size();
  const std::size_t m = gy.size();
  const auto dn = static_cast<double>(n);
  const auto dm = static_cast<double>(m);

  std::vector<PpRow> pp;
  {
    const auto xs = fx.sorted_values();
    const auto ys = gy.sorted_values();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < n || j < m) {
      const double z = (j == m || (i < n && xs[i] <= ys[j])) ? xs[i] : ys[j];
      const std::size_t i0 = i;
      while (i < n && xs[i] == z) ++i;
      while (j < m && ys[j] == z) ++j;
      pp.push_back({static_cast<double>(i0) / dn, static_cast<double>(i) / dn,
                    static_cast<double>(j) / dm});
    }
  }

  // Common refinement of {k/n} and {j/m}: compare k*m with j*n exactly.
  std::vector<QqRow> qq;
  {
    std::size_t k = 0;
    std::size_t j = 0;
    double lo = 0.0;
    while (k < n || j < m) {
      const std::size_t nk = (k + 1) * m;
      const std::size_t nj = (j + 1) * n;
      double hi = 0.0;
      if (nk <= nj) {
        ++k;
        if (nk == nj) ++j;
        hi = static_cast<double>(k) / dn;
      } else {
        ++j;
        hi = static_cast<double>(j) / dm;
      }
      // quantiles on (lo, hi] are the ceil(t n)-th and ceil(t m)-th values
      const std::size_t kx = (k * m >= j * n) ? k : k + 1;
      const std::size_t jy = (j * n >= k * m) ? j : j + 1;
      qq.push_back({lo, hi, fx.order_statistic(kx), gy.order_statistic(jy)});
      lo = hi;
    }
  }

  CurveSet curves{std::move(pp), std::move(qq), roc_curve(fx, gy),
                  odc_curve(fx, gy), 0.0, n, m};
  curves.auc = auc(curves.roc);
  return curves;
}

namespace {

nlohmann::json step_to_json(const StepFunction& f) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < f.piece_count(); ++k) {
    rows.push_back({{"t_lo", f.lo(k)}, {"t_hi", f.hi(k)}, {"value", f.values()[k]}});
  }
  return rows;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

nlohmann::json curves_to_json(const CurveSet& curves) {
  nlohmann::json pp = nlohmann::json::array();
  for (const auto& r : curves.pp) {
    pp.push_back({{"t_lo", r.t_lo}, {"t_hi", r.t_hi}, {"value", r.value}});
  }
  nlohmann::json qq = nlohmann::json::array();
  for (const auto& r : curves.qq) {
    qq.push_back({{"t_lo", r.t_lo},
                  {"t_hi", r.t_hi},
                  {"x_quantile", r.x_quantile},
                  {"y_quantile", r.y_quantile}});
  }
  return {{"schema", kReportSchema},
          {"n", curves.n},
          {"m", curves.m},
          {"pp", pp},
          {"qq", qq},
          {"roc", {{"pieces", step_to_json(curves.roc)}, {"auc", curves.auc}}},
          {"odc", {{"pieces", step_to_json(curves.odc)}}}};
}

std::vector<std::filesystem::path> export_curves(
    const CurveSet& curves, const std::filesystem::path& dir,
    OutputFormat format) {
  std::filesystem::create_directories(dir);
  if (format == OutputFormat::kJson) {
    const auto path = dir / "curves.json";
    auto out = open_output(path);
    out << curves_to_json(curves).dump(2) << '\n';
    return {path};
  }
  std::vector<std::filesystem::path> written;
  {
    const auto path = dir / "pp.csv";
    auto out = open_output(path);
    out << "t_lo,t_hi,value\n";
    for (const auto& r : curves.pp) {
      out << r.t_lo << ',' << r.t_hi << ',' << r.value << '\n';
    }
    written.push_back(path);
  }
  {
    const auto path = dir / "qq.csv";
    auto out = open_output(path);
    out << "t_lo,t_hi,x_quantile,y_quantile\n";
    for (const auto& r : curves.qq) {
      out << r.t_lo << ',' << r.t_hi << ',' << r.x_quantile << ','
          << r.y_quantile << '\n';
    }
    written.push_back(path);
  }
  for (const auto& [name, f] :
       {std::pair{"roc.csv", &curves.roc}, std::pair{"odc.csv", &curves.odc}}) {
    const auto path = dir / name;
    auto out = open_output(path);
    write_step_csv(out, *f);
    written.push_back(path);
  }
  {
    const auto path = dir / "summary.json";
    auto out = open_output(path);
    const nlohmann::json summary = {{"schema", kReportSchema},
                                    {"n", curves.n},
                                    {"m", curves.m},
                                    {"auc", curves.auc}};
    out << summary.dump(2) << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace twosample
