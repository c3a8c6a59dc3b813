#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hodgelab/family.hpp"

namespace hodgelab {

struct Tolerances {
  double identity = 1e-8;
  double grid_identity = 1e-3;
  double agreement = 1e-7;
  double grid_agreement = 1e-3;
  double oracle = 1e-5;
  double grid_oracle = 1e-3;
  double hermitian = 1e-10;
  double bkn = 1e-10;
  double grid_bkn = 5e-4;
  double wp_norm = 1e-12;
  double wp = 1e-10;
  double gauge = 1e-8;
};

struct ExpectedValue {
  int p = 0;
  int q = 0;
  double normalized = 0.0;
  double tolerance = 1e-5;
};

struct ExperimentConfig {
  std::string name;
  FamilyDescriptor family;
  cplx s0 = 0.0;
  std::vector<std::pair<int, int>> bidegrees;  // empty: every bidegree with a frame
  std::vector<std::string> suites;
  Tolerances tol;
  std::vector<ExpectedValue> expected;
  std::vector<double> gauge_shifts;
  double fd_step = 1e-3;
  double line_shift = 1.0;
  std::uint64_t seed = 1;
  int identity_seeds = 1;
  int max_mode = 2;
  std::string json_out;
  std::string csv_out;
};

const std::vector<std::string>& suite_names();

// Parse a YAML config; unknown keys, bad values and non-positive tolerances raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Bidegrees the run covers: the configured list, or all (p, q) with a nonzero expected rank.
std::vector<std::pair<int, int>> run_bidegrees(const ExperimentConfig& cfg);

void scale_tolerances(ExperimentConfig& cfg, double factor);

}  // namespace hodgelab
