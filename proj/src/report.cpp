#include "twosample/report.hpp"

#include <stdexcept>

namespace twosample {

TestReport finalize_report(TestReport report) {
  if (!(report.alpha > 0.0 && report.alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  if (!(report.p_value > 0.0 && report.p_value <= 1.0)) {
    throw std::logic_error("p-value outside (0, 1]");
  }
  report.reject = report.p_value <= report.alpha;
  return report;
}

nlohmann::json report_to_json(const TestReport& r) {
  return {
      {"schema", kReportSchema},
      {"statistic", r.statistic},
      {"parameters", r.parameters},
      {"raw_value", r.raw_value},
      {"scaled_value", r.scaled_value},
      {"p_value", r.p_value},
      {"alpha", r.alpha},
      {"reject", r.reject},
      {"calibration", r.calibration_method},
      {"null_kind", std::string(to_string(r.null_model.kind))},
      {"resamples_or_paths", r.null_model.resamples_or_paths},
      {"seed", r.null_model.seed},
      {"grid_size", r.null_model.grid_size},
      {"n", r.n},
      {"m", r.m},
      {"config", r.config},
  };
}

TestReport report_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string()) != kReportSchema) {
    throw std::invalid_argument("unsupported report schema");
  }
  TestReport r;
  r.statistic = j.at("statistic").get<std::string>();
  r.parameters = j.at("parameters");
  r.raw_value = j.at("raw_value").get<double>();
  r.scaled_value = j.at("scaled_value").get<double>();
  r.p_value = j.at("p_value").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.reject = j.at("reject").get<bool>();
  r.calibration_method = j.at("calibration").get<std::string>();
  const auto kind = parse_null_kind(j.at("null_kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown null_kind in report");
  r.null_model.kind = *kind;
  r.null_model.resamples_or_paths = j.at("resamples_or_paths").get<std::size_t>();
  r.null_model.seed = j.at("seed").get<std::uint64_t>();
  r.null_model.grid_size = j.at("grid_size").get<std::size_t>();
  r.n = j.at("n").get<std::size_t>();
  r.m = j.at("m").get<std::size_t>();
  r.config = j.at("config");
  return r;
}

}  // namespace twosample
