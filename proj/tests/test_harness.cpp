#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hodgelab/errors.hpp"
#include "hodgelab/harness.hpp"

using namespace hodgelab;

namespace {

const std::string kDir = HODGELAB_CONFIG_DIR;

const char* kSmall = R"(
name: small
family: {kind: complex_structure, n: 1, tau0: [0, 1], tau1: 1}
backend: {kind: fourier, cutoff: 4}
suites: [curvature]
bidegrees: [[1, 0]]
expected:
  - {bidegree: [1, 0], normalized: 0.25}
gauge_shifts: [2]
)";

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Precondition;
}

}  // namespace

TEST_CASE("bundled configs parse") {
  for (const char* name : {"elliptic_hodge", "abelian_surface", "theta_line", "theta_dual", "character_line",
                           "character_end"}) {
    const auto cfg = load_config(kDir + "/" + name + ".cfg");
    CHECK(cfg.name == name);
    CHECK_FALSE(run_bidegrees(cfg).empty());
  }
  const auto th = load_config(kDir + "/theta_line.cfg");
  CHECK(th.family.backend == Backend::Grid);
  CHECK(th.family.degree == 1);
}

TEST_CASE("config errors") {
  CHECK(code_of([] { parse_config(std::string(kSmall) + "bogus: 1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(std::string(kSmall) + "tolerances: {identity: -1}\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("name: x\n"); }) == ErrorCode::ConfigError);
  std::string nope = kSmall;
  nope.replace(nope.find("[curvature]"), 11, "[nope]");
  CHECK(code_of([&] { parse_config(nope); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(std::string(kSmall) + "seed: 1\nseed: 2\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("family: [unclosed\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { load_config(kDir + "/missing.cfg"); }) == ErrorCode::IoError);
}

TEST_CASE("default bidegrees cover the nonzero ranks") {
  auto cfg = parse_config(kSmall);
  cfg.bidegrees.clear();
  CHECK(run_bidegrees(cfg).size() == 4);
  cfg.family.kind = FamilyKind::Theta;
  cfg.family.degree = 1;
  CHECK(run_bidegrees(cfg) == std::vector<std::pair<int, int>>{{0, 0}, {1, 0}});
}

TEST_CASE("empty suite list gives an empty passing report") {
  auto cfg = parse_config(kSmall);
  cfg.suites.clear();
  const auto rep = run(cfg);
  CHECK(rep.pass());
  CHECK(rep.check_count() == 0);
}

TEST_CASE("small run: checks, json and csv") {
  const auto cfg = parse_config(kSmall);
  const auto rep = run(cfg);
  CHECK(rep.pass());
  REQUIRE(rep.suites.size() == 1);
  bool saw_expected = false, saw_gauge = false;
  for (const auto& c : rep.suites[0].checks) {
    saw_expected |= c.name.rfind("expected/", 0) == 0;
    saw_gauge |= c.name.rfind("gauge", 0) == 0;
  }
  CHECK(saw_expected);
  CHECK(saw_gauge);

  const auto j = to_json(rep);
  CHECK(nlohmann::json::parse(j.dump()) == nlohmann::json(j));
  const std::string csv = to_csv(rep);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == rep.check_count() + 1);
  CHECK(csv.rfind("suite,check,value,tolerance,pass\n", 0) == 0);
}

TEST_CASE("reports are deterministic and diffable") {
  const auto cfg = parse_config(kSmall);
  const auto a = to_json(run(cfg)).dump(2);
  const auto b = to_json(run(cfg)).dump(2);
  CHECK(a == b);
  CHECK(diff_reports(nlohmann::json::parse(a), nlohmann::json::parse(b)).empty());
  auto c = nlohmann::json::parse(a);
  c["tolerance_scale"] = 3.0;
  CHECK_FALSE(diff_reports(nlohmann::json::parse(a), c).empty());
}

TEST_CASE("tolerance scale is applied and recorded") {
  const auto cfg = parse_config(kSmall);
  const auto rep = run(cfg, 10.0);
  CHECK(rep.tolerance_scale == 10.0);
  CHECK(to_json(rep)["tolerance_scale"] == 10.0);
  CHECK(rep.config.tol.agreement == doctest::Approx(1e-6));
}

TEST_CASE("failing expectation fails the run") {
  auto cfg = parse_config(kSmall);
  cfg.expected[0].normalized = 0.3;
  CHECK_FALSE(run(cfg).pass());
}

TEST_CASE("module errors surface as suite errors") {
  auto cfg = parse_config(kSmall);
  cfg.suites = {"wp"};
  const auto rep = run(cfg);
  CHECK(rep.suites[0].status == "skipped");
  cfg.family.tau0 = CMat::Constant(1, 1, cplx(0, -1));
  cfg.suites = {"curvature"};
  const auto bad = run(cfg);
  CHECK(bad.suites[0].status == "error");
  CHECK_FALSE(bad.pass());
}

TEST_CASE("emit writes files") {
  const auto rep = run(parse_config(kSmall));
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "hodgelab_emit_test.csv").string();
  emit(rep, path, "csv");
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == "suite,check,value,tolerance,pass");
  std::filesystem::remove(path);
  CHECK(code_of([&] { emit(rep, "/nonexistent_dir/x.json", "json"); }) == ErrorCode::IoError);
}
