#pragma once

#include "twosample/calibration.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>

namespace twosample {

inline constexpr const char* kReportSchema = "v1";

/// Outcome of one calibrated test. reject <=> p_value <= alpha.
struct TestReport {
  std::string statistic;
  nlohmann::json parameters = nlohmann::json::object();
  double raw_value = 0.0;
  double scaled_value = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  std::string calibration_method;  // "perm" or "asymp"
  NullModel null_model;
  std::size_t n = 0;
  std::size_t m = 0;
  nlohmann::json config = nlohmann::json::object();

  bool operator==(const TestReport&) const = default;
};

/// Fills `reject` from p_value and alpha; checks p_value in (0, 1] and
/// alpha in (0, 1).
TestReport finalize_report(TestReport report);

nlohmann::json report_to_json(const TestReport& report);
TestReport report_from_json(const nlohmann::json& j);

}  // namespace twosample
