#include "hodgelab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "hodgelab/errors.hpp"
#include "hodgelab/frames.hpp"

namespace hodgelab {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::ConfigError, what); }

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) bad(where + " must be a mapping");
  std::set<std::string> seen;
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) bad("unknown key '" + key + "' in " + where);
    if (!seen.insert(key).second) bad("duplicate key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    bad("bad value for " + where);
  }
}

// A complex number is a scalar or a two-element list [re, im].
cplx complex_value(const YAML::Node& node, const std::string& where) {
  if (node.IsScalar()) return scalar<double>(node, where);
  if (node.IsSequence() && node.size() == 2) return {scalar<double>(node[0], where), scalar<double>(node[1], where)};
  bad("bad complex value for " + where);
}

// A matrix is a complex scalar (1 x 1) or a list of rows.
CMat complex_matrix(const YAML::Node& node, const std::string& where) {
  if (node.IsScalar() || (node.IsSequence() && node.size() == 2 && node[0].IsScalar()))
    return CMat::Constant(1, 1, complex_value(node, where));
  if (!node.IsSequence() || node.size() == 0) bad("bad matrix for " + where);
  const int rows = static_cast<int>(node.size());
  const int cols = node[0].IsSequence() ? static_cast<int>(node[0].size()) : 0;
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!node[i].IsSequence() || static_cast<int>(node[i].size()) != cols) bad("ragged matrix for " + where);
    for (int j = 0; j < cols; ++j) m(i, j) = complex_value(node[i][j], where);
  }
  return m;
}

CVec complex_vector(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) bad("bad vector for " + where);
  CVec v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) v[i] = complex_value(node[i], where);
  return v;
}

double positive(const YAML::Node& node, const std::string& where) {
  const double v = scalar<double>(node, where);
  if (!(v > 0.0)) bad(where + " must be positive");
  return v;
}

FamilyDescriptor parse_family(const YAML::Node& node) {
  check_keys(node, "family", {"kind", "n", "tau0", "tau1", "degree", "summands", "end", "beta"});
  FamilyDescriptor f;
  if (!node["kind"]) bad("family.kind is required");
  const auto kind = scalar<std::string>(node["kind"], "family.kind");
  if (kind == "complex_structure") f.kind = FamilyKind::ComplexStructure;
  else if (kind == "theta") f.kind = FamilyKind::Theta;
  else if (kind == "character") f.kind = FamilyKind::Character;
  else bad("unknown family kind '" + kind + "'");
  if (node["n"]) f.n = scalar<int>(node["n"], "family.n");
  if (!node["tau0"]) bad("family.tau0 is required");
  f.tau0 = complex_matrix(node["tau0"], "family.tau0");
  f.tau1 = node["tau1"] ? complex_matrix(node["tau1"], "family.tau1") : CMat::Zero(f.n, f.n);
  if (node["degree"]) f.degree = scalar<int>(node["degree"], "family.degree");
  if (node["end"]) f.end = scalar<bool>(node["end"], "family.end");
  if (node["beta"]) f.beta = scalar<double>(node["beta"], "family.beta");
  if (node["summands"]) {
    if (!node["summands"].IsSequence()) bad("family.summands must be a list");
    for (const auto& s : node["summands"]) {
      check_keys(s, "family.summands", {"ell", "kappa"});
      CharacterSummand cs;
      cs.ell = s["ell"] ? complex_vector(s["ell"], "summand.ell") : CVec::Zero(f.n);
      if (s["kappa"]) cs.kappa = scalar<double>(s["kappa"], "summand.kappa");
      f.summands.push_back(cs);
    }
  }
  return f;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "curvature", "oracle", "wp"};
  return names;
}

namespace {

ExperimentConfig parse_root(const YAML::Node& root) {
  check_keys(root, "config",
             {"name", "family", "backend", "base_point", "bidegrees", "suites", "tolerances", "expected", "gauge_shifts",
              "fd_step", "line_shift", "seed", "identity_seeds", "max_mode", "output"});
  ExperimentConfig cfg;
  if (root["name"]) cfg.name = scalar<std::string>(root["name"], "name");
  if (!root["family"]) bad("family is required");
  cfg.family = parse_family(root["family"]);

  if (const auto b = root["backend"]) {
    check_keys(b, "backend", {"kind", "cutoff", "grid"});
    if (b["kind"]) {
      const auto k = scalar<std::string>(b["kind"], "backend.kind");
      if (k == "fourier") cfg.family.backend = Backend::Fourier;
      else if (k == "grid") cfg.family.backend = Backend::Grid;
      else bad("unknown backend '" + k + "'");
    }
    if (b["cutoff"]) cfg.family.cutoff = scalar<int>(b["cutoff"], "backend.cutoff");
    if (b["grid"]) cfg.family.grid = scalar<int>(b["grid"], "backend.grid");
  }
  try {
    validate_family(cfg.family);
  } catch (const Error& e) {
    bad(std::string("invalid family: ") + e.what());
  }

  if (root["base_point"]) cfg.s0 = complex_value(root["base_point"], "base_point");
  if (const auto bd = root["bidegrees"]) {
    if (!bd.IsSequence()) bad("bidegrees must be a list");
    for (const auto& e : bd) {
      if (!e.IsSequence() || e.size() != 2) bad("bidegree must be [p, q]");
      const int p = scalar<int>(e[0], "bidegree"), q = scalar<int>(e[1], "bidegree");
      if (p < 0 || q < 0 || p > cfg.family.n || q > cfg.family.n) bad("bidegree outside [0, n]");
      cfg.bidegrees.emplace_back(p, q);
    }
  }
  if (const auto su = root["suites"]) {
    if (!su.IsSequence()) bad("suites must be a list");
    for (const auto& e : su) {
      const auto s = scalar<std::string>(e, "suite");
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) bad("unknown suite '" + s + "'");
      cfg.suites.push_back(s);
    }
  }
  if (const auto t = root["tolerances"]) {
    check_keys(t, "tolerances",
               {"identity", "grid_identity", "agreement", "grid_agreement", "oracle", "grid_oracle", "hermitian", "bkn",
                "grid_bkn", "wp_norm", "wp", "gauge"});
    auto set = [&](const char* key, double& dst) {
      if (t[key]) dst = positive(t[key], std::string("tolerances.") + key);
    };
    set("identity", cfg.tol.identity);
    set("grid_identity", cfg.tol.grid_identity);
    set("agreement", cfg.tol.agreement);
    set("grid_agreement", cfg.tol.grid_agreement);
    set("oracle", cfg.tol.oracle);
    set("grid_oracle", cfg.tol.grid_oracle);
    set("hermitian", cfg.tol.hermitian);
    set("bkn", cfg.tol.bkn);
    set("grid_bkn", cfg.tol.grid_bkn);
    set("wp_norm", cfg.tol.wp_norm);
    set("wp", cfg.tol.wp);
    set("gauge", cfg.tol.gauge);
  }
  if (const auto ex = root["expected"]) {
    if (!ex.IsSequence()) bad("expected must be a list");
    for (const auto& e : ex) {
      check_keys(e, "expected", {"bidegree", "normalized", "tolerance"});
      ExpectedValue v;
      if (!e["bidegree"] || !e["bidegree"].IsSequence() || e["bidegree"].size() != 2) bad("expected.bidegree must be [p, q]");
      v.p = scalar<int>(e["bidegree"][0], "expected.bidegree");
      v.q = scalar<int>(e["bidegree"][1], "expected.bidegree");
      if (!e["normalized"]) bad("expected.normalized is required");
      v.normalized = scalar<double>(e["normalized"], "expected.normalized");
      if (e["tolerance"]) v.tolerance = positive(e["tolerance"], "expected.tolerance");
      cfg.expected.push_back(v);
    }
  }
  if (const auto g = root["gauge_shifts"]) {
    if (!g.IsSequence()) bad("gauge_shifts must be a list");
    for (const auto& e : g) cfg.gauge_shifts.push_back(scalar<double>(e, "gauge_shifts"));
  }
  if (root["fd_step"]) cfg.fd_step = positive(root["fd_step"], "fd_step");
  if (root["line_shift"]) cfg.line_shift = positive(root["line_shift"], "line_shift");
  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["identity_seeds"]) {
    cfg.identity_seeds = scalar<int>(root["identity_seeds"], "identity_seeds");
    if (cfg.identity_seeds < 1) bad("identity_seeds must be at least 1");
  }
  if (root["max_mode"]) {
    cfg.max_mode = scalar<int>(root["max_mode"], "max_mode");
    if (cfg.max_mode < 0) bad("max_mode must be non-negative");
  }
  if (const auto o = root["output"]) {
    check_keys(o, "output", {"json", "csv"});
    if (o["json"]) cfg.json_out = scalar<std::string>(o["json"], "output.json");
    if (o["csv"]) cfg.csv_out = scalar<std::string>(o["csv"], "output.csv");
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    bad(std::string("malformed config: ") + e.what());
  }
  try {
    return parse_root(root);
  } catch (const YAML::Exception& e) {
    bad(std::string("malformed config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<int, int>> run_bidegrees(const ExperimentConfig& cfg) {
  if (!cfg.bidegrees.empty()) return cfg.bidegrees;
  std::vector<std::pair<int, int>> out;
  for (int p = 0; p <= cfg.family.n; ++p)
    for (int q = 0; q <= cfg.family.n; ++q)
      if (expected_rank(cfg.family, p, q) > 0) out.emplace_back(p, q);
  return out;
}

void scale_tolerances(ExperimentConfig& cfg, double factor) {
  if (!(factor > 0.0)) fail(ErrorCode::ConfigError, "tolerance scale must be positive");
  for (double* t : {&cfg.tol.identity, &cfg.tol.grid_identity, &cfg.tol.agreement, &cfg.tol.grid_agreement,
                    &cfg.tol.oracle, &cfg.tol.grid_oracle, &cfg.tol.hermitian, &cfg.tol.bkn, &cfg.tol.grid_bkn,
                    &cfg.tol.wp_norm, &cfg.tol.wp, &cfg.tol.gauge})
    *t *= factor;
  for (auto& e : cfg.expected) e.tolerance *= factor;
}

}  // namespace hodgelab
