#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "hodgelab/errors.hpp"
#include "hodgelab/harness.hpp"

using namespace hodgelab;

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature of direct images on torus families"};
  app.require_subcommand(1);

  std::string config, out, format = "json";
  std::uint64_t seed = 0;
  double tolerance_scale = 1.0;
  auto* run_cmd = app.add_subcommand("run", "Run the configured suites");
  run_cmd->add_option("--config", config, "Experiment config (YAML)")->required();
  run_cmd->add_option("--out", out, "Report path (defaults to the config output or stdout)");
  run_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--tolerance-scale", tolerance_scale, "Multiply every tolerance");

  app.add_subcommand("list-suites", "List suite names");

  std::string describe_config;
  auto* describe_cmd = app.add_subcommand("describe-family", "Summarize the family of a config");
  describe_cmd->add_option("--config", describe_config, "Experiment config (YAML)")->required();

  std::string diff_a, diff_b;
  auto* diff_cmd = app.add_subcommand("diff-reports", "Compare two JSON reports");
  diff_cmd->add_option("a", diff_a)->required();
  diff_cmd->add_option("b", diff_b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list-suites")) {
      for (const auto& s : suite_names()) std::cout << s << "\n";
      return 0;
    }
    if (app.got_subcommand("describe-family")) {
      std::cout << describe_family(load_config(describe_config)).dump(2) << "\n";
      return 0;
    }
    if (app.got_subcommand("diff-reports")) {
      const auto diffs = diff_reports(read_json(diff_a), read_json(diff_b));
      for (const auto& d : diffs) std::cout << d << "\n";
      if (diffs.empty()) std::cout << "identical\n";
      return diffs.empty() ? 0 : 1;
    }

    ExperimentConfig cfg = load_config(config);
    if (*seed_opt) cfg.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const RunReport rep = run(cfg, tolerance_scale);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string path = out;
    if (path.empty()) path = format == "csv" ? cfg.csv_out : cfg.json_out;
    if (path.empty()) {
      std::cout << (format == "csv" ? to_csv(rep) : to_json(rep).dump(2) + "\n");
    } else {
      emit(rep, path, format);
    }
    for (const auto& s : rep.suites) {
      std::size_t failed = 0;
      for (const auto& c : s.checks) failed += !c.pass;
      std::cerr << s.name << ": " << s.status << " (" << s.checks.size() << " checks, " << failed << " failed)";
      if (!s.error.empty()) std::cerr << " " << s.error;
      std::cerr << "\n";
    }
    std::cerr << "wall clock " << secs << " s\n";
    return rep.pass() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << error_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
}
