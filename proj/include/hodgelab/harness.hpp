#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "hodgelab/config.hpp"

namespace hodgelab {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string note;
};

struct SuiteResult {
  std::string name;
  std::string status = "pass";  // pass | fail | error | skipped
  std::string error;
  std::vector<Check> checks;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  bool pass() const { return status == "pass" || status == "skipped"; }
};

struct RunReport {
  ExperimentConfig config;
  double tolerance_scale = 1.0;
  std::vector<SuiteResult> suites;
  bool pass() const;
  std::size_t check_count() const;
};

RunReport run(const ExperimentConfig& cfg, double tolerance_scale = 1.0);

nlohmann::ordered_json config_json(const ExperimentConfig& cfg);
nlohmann::ordered_json to_json(const RunReport& report);
std::string to_csv(const RunReport& report);
// Writes the report in the given format ("json" or "csv"); raises IoError on failure.
void emit(const RunReport& report, const std::string& path, const std::string& format);

// Family summary for describe-family.
nlohmann::ordered_json describe_family(const ExperimentConfig& cfg);

// Paths whose values differ between two JSON reports; empty if they are equal.
std::vector<std::string> diff_reports(const nlohmann::json& a, const nlohmann::json& b);

const char* version_string();

}  // namespace hodgelab
