#include "hodgelab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hodgelab/errors.hpp"
#include "hodgelab/fd_oracle.hpp"
#include "hodgelab/identities.hpp"

namespace hodgelab {

using ojson = nlohmann::ordered_json;

namespace {

std::string bideg(int p, int q) { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }

ojson complex_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

ojson matrix_json(const CMat& m) {
  ojson rows = ojson::array();
  for (int i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

ojson report_json(const CurvatureReport& r) {
  ojson j;
  j["evaluator"] = r.evaluator;
  j["p"] = r.p;
  j["q"] = r.q;
  j["value"] = matrix_json(r.value);
  if (r.value.rows() == 1) j["normalized"] = r.normalized();
  j["gram"] = matrix_json(r.gram);
  ojson terms = ojson::array();
  for (const auto& t : r.terms) terms.push_back({{"name", t.first}, {"value", matrix_json(t.second)}});
  j["terms"] = terms;
  ojson diag = ojson::object();
  for (const auto& d : r.diagnostics) diag[d.first] = d.second;
  j["diagnostics"] = diag;
  return j;
}

bool grid(const ExperimentConfig& cfg) { return cfg.family.backend == Backend::Grid; }

void add(SuiteResult& s, const std::string& name, double value, double tol, const std::string& note = "") {
  const bool pass = value <= tol && !std::isnan(value);
  s.checks.push_back({name, value, tol, pass, note});
}

// Entrywise disagreement scaled by the size of the reference tensor and of the Gram matrix,
// so that vanishing curvatures are compared on the scale of |psi|^2.
double disagreement(const CMat& a, const CMat& ref, const CMat& gram) {
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), gram.cwiseAbs().maxCoeff());
  return (a - ref).cwiseAbs().maxCoeff() / scale;
}

CurvatureReport evaluate_cfg(const ExperimentConfig& cfg, const std::string& name, const HorizontalData& hd,
                             const HarmonicFrame& fr) {
  if (name == "line_p0") {
    LineOptions lo;
    lo.shift = cfg.line_shift;
    return curvature_line_p0(hd, fr, lo);
  }
  return evaluate(name, hd, fr);
}

void identities_suite(const ExperimentConfig& cfg, SuiteResult& s) {
  std::vector<IdentityResult> worst;
  for (int k = 0; k < cfg.identity_seeds; ++k) {
    IdentityOptions opt;
    opt.seed = cfg.seed + static_cast<std::uint64_t>(k);
    opt.tolerance = cfg.tol.identity;
    opt.grid_tolerance = cfg.tol.grid_identity;
    opt.max_mode = cfg.max_mode;
    const IdentityReport rep = identity_suite(cfg.family, cfg.s0, opt);
    if (worst.empty()) {
      worst = rep.results;
      continue;
    }
    for (std::size_t i = 0; i < worst.size(); ++i) {
      const auto& r = rep.results[i];
      if (r.applicable && (!worst[i].applicable || r.defect > worst[i].defect)) worst[i] = r;
    }
  }
  ojson skipped = ojson::object();
  for (const auto& r : worst) {
    if (!r.applicable) {
      skipped[r.name] = r.note;
      continue;
    }
    if (r.informational) {
      s.checks.push_back({"identity/" + r.name, r.defect, r.tolerance, true, "informational " + r.note});
    } else {
      add(s, "identity/" + r.name, r.defect, r.tolerance, r.note);
    }
  }
  s.details["seeds"] = cfg.identity_seeds;
  s.details["skipped"] = skipped;

  const FiberState st = fiber_state(cfg.family, cfg.s0);
  const double tol = grid(cfg) ? cfg.tol.grid_bkn : cfg.tol.bkn;
  for (int p = 0; p <= cfg.family.n; ++p)
    for (int q = 0; q <= cfg.family.n; ++q) {
      const PQForm psi = random_form(st.space, p, q, cfg.seed + 101 * p + 7 * q, cfg.max_mode);
      add(s, "bkn" + bideg(p, q), bkn_defect(psi), tol);
    }
}

void curvature_suite(const ExperimentConfig& cfg, SuiteResult& s) {
  const HorizontalData hd = horizontal_data(cfg.family, cfg.s0);
  const double agree = grid(cfg) ? cfg.tol.grid_agreement : cfg.tol.agreement;
  ojson reports = ojson::array();
  s.details["c"] = hd.c;
  for (const auto& [p, q] : run_bidegrees(cfg)) {
    const std::string where = bideg(p, q);
    if (expected_rank(cfg.family, p, q) == 0) {
      s.details["zero_rank"].push_back(where);
      continue;
    }
    const HarmonicFrame fr = harmonic_frame(hd, p, q);
    std::vector<CurvatureReport> done;
    for (const auto& ev : applicable_evaluators(hd, p, q)) {
      try {
        CurvatureReport r = evaluate_cfg(cfg, ev, hd, fr);
        const double scale = std::max(r.value.cwiseAbs().maxCoeff(), r.gram.cwiseAbs().maxCoeff());
        add(s, "hermitian/" + ev + where, r.hermitian_defect() / scale, cfg.tol.hermitian);
        add(s, "bookkeeping/" + ev + where, r.bookkeeping_defect() / scale, cfg.tol.hermitian);
        reports.push_back(report_json(r));
        done.push_back(std::move(r));
      } catch (const Error& e) {
        s.checks.push_back({"error/" + ev + where, 1.0, 0.0, false, e.what()});
      }
    }
    if (done.empty() || done.front().evaluator != "main") continue;
    const CurvatureReport& main = done.front();
    for (std::size_t k = 1; k < done.size(); ++k)
      add(s, "agreement/" + done[k].evaluator + "_vs_main" + where, disagreement(done[k].value, main.value, main.gram),
          agree);
    for (const auto& e : cfg.expected) {
      if (e.p != p || e.q != q) continue;
      for (const auto& r : done)
        add(s, "expected/" + r.evaluator + where, std::abs(r.normalized() - e.normalized), e.tolerance,
            "expected " + std::to_string(e.normalized));
    }
    for (double beta : cfg.gauge_shifts) {
      FamilyDescriptor f2 = cfg.family;
      f2.beta += beta;
      const HorizontalData hd2 = horizontal_data(f2, cfg.s0);
      const HarmonicFrame fr2 = harmonic_frame(hd2, p, q);
      std::ostringstream tag;
      tag << "[beta=" << beta << "]";
      const auto evs2 = applicable_evaluators(hd2, p, q);
      for (const auto& r : done) {
        if (std::find(evs2.begin(), evs2.end(), r.evaluator) == evs2.end()) continue;
        const CurvatureReport r2 = evaluate_cfg(cfg, r.evaluator, hd2, fr2);
        add(s, "gauge/" + r.evaluator + where + tag.str(), disagreement(r2.value, r.value, r.gram), cfg.tol.gauge);
      }
      add(s, "gauge_c" + where + tag.str(), std::abs(hd2.c - hd.c - beta), 1e-12 * (1.0 + std::abs(beta)),
          "c must shift by beta");
    }
  }
  s.details["reports"] = reports;
}

void oracle_suite(const ExperimentConfig& cfg, SuiteResult& s) {
  const HorizontalData hd = horizontal_data(cfg.family, cfg.s0);
  const double tol = grid(cfg) ? cfg.tol.grid_oracle : cfg.tol.oracle;
  ojson out = ojson::array();
  for (const auto& [p, q] : run_bidegrees(cfg)) {
    if (expected_rank(cfg.family, p, q) == 0) continue;
    const std::string where = bideg(p, q);
    const FdResult fd = curvature_fd(cfg.family, cfg.s0, p, q, cfg.fd_step);
    ojson j;
    j["p"] = p;
    j["q"] = q;
    j["h"] = cfg.fd_step;
    j["value"] = matrix_json(fd.value);
    j["gram"] = matrix_json(fd.gram);
    j["richardson_error"] = fd.error;
    if (fd.value.rows() == 1) j["normalized"] = fd.normalized();
    const HarmonicFrame fr = harmonic_frame(hd, p, q);
    for (const auto& ev : applicable_evaluators(hd, p, q)) {
      const CurvatureReport r = evaluate_cfg(cfg, ev, hd, fr);
      const CMat a = r.value, b = fd.value;
      const double d = disagreement(a, b, fd.gram);
      j["delta"][ev] = d;
      add(s, "oracle/" + ev + "_vs_fd" + where, d, tol);
    }
    for (const auto& e : cfg.expected)
      if (e.p == p && e.q == q && fd.value.rows() == 1)
        add(s, "expected/fd" + where, std::abs(fd.normalized() - e.normalized), e.tolerance,
            "expected " + std::to_string(e.normalized));
    out.push_back(j);
  }
  s.details["fd"] = out;
}

void wp_suite_run(const ExperimentConfig& cfg, SuiteResult& s) {
  const HorizontalData hd = horizontal_data(cfg.family, cfg.s0);
  if (!is_product_family(cfg.family) || !hd.space()->flat()) {
    s.status = "skipped";
    s.details["reason"] = "needs a product family with flat fibers";
    return;
  }
  const WPReport w = wp_suite(hd);
  const double tol = cfg.tol.wp;
  add(s, "wp_norm", std::abs(w.norm_direct - w.norm_lambda) / std::max(w.norm_direct, 1e-300), cfg.tol.wp_norm);
  for (std::size_t k = 0; k < w.curvflat.size(); ++k)
    add(s, "curvflat[q=" + std::to_string(k + 1) + "]", std::abs(w.curvflat[k]), tol);
  for (std::size_t k = 0; k < w.he_drop.size(); ++k)
    add(s, "he_drop[q=" + std::to_string(k + 1) + "]", std::abs(w.he_drop[k]), tol);
  for (std::size_t k = 0; k < w.harmonic_defect.size(); ++k)
    add(s, "eta_power_harmonic[" + std::to_string(k) + "]", w.harmonic_defect[k], tol);
  add(s, "eta2_harmonic", w.eta2_harmonic_defect, tol);
  add(s, "semipositivity", std::max(0.0, -w.sectional), 1e-12, "negative part of the sectional curvature");
  s.details["norm_direct"] = w.norm_direct;
  s.details["norm_lambda"] = w.norm_lambda;
  s.details["curv_wp"] = w.curv_wp;
  ojson terms = ojson::object();
  for (const auto& t : w.curv_wp_terms) terms[t.first] = t.second;
  s.details["curv_wp_terms"] = terms;
  s.details["sectional"] = w.sectional;
  s.details["semipositive"] = w.semipositive;
}

}  // namespace

const char* version_string() { return "hodgelab 1.0.0"; }

bool RunReport::pass() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass(); });
}

std::size_t RunReport::check_count() const {
  std::size_t n = 0;
  for (const auto& s : suites) n += s.checks.size();
  return n;
}

RunReport run(const ExperimentConfig& cfg, double tolerance_scale) {
  RunReport rep;
  rep.config = cfg;
  rep.tolerance_scale = tolerance_scale;
  if (tolerance_scale != 1.0) scale_tolerances(rep.config, tolerance_scale);
  for (const auto& name : rep.config.suites) {
    SuiteResult s;
    s.name = name;
    try {
      if (name == "identities") identities_suite(rep.config, s);
      else if (name == "curvature") curvature_suite(rep.config, s);
      else if (name == "oracle") oracle_suite(rep.config, s);
      else if (name == "wp") wp_suite_run(rep.config, s);
      else fail(ErrorCode::ConfigError, "unknown suite " + name);
      if (s.status != "skipped")
        s.status = std::all_of(s.checks.begin(), s.checks.end(), [](const Check& c) { return c.pass; }) ? "pass" : "fail";
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      s.status = "error";
      s.error = e.what();
    }
    rep.suites.push_back(std::move(s));
  }
  return rep;
}

ojson config_json(const ExperimentConfig& cfg) {
  const auto& f = cfg.family;
  ojson fam;
  fam["kind"] = family_kind_name(f.kind);
  fam["n"] = f.n;
  fam["tau0"] = matrix_json(f.tau0);
  fam["tau1"] = matrix_json(f.tau1.size() ? f.tau1 : CMat::Zero(f.n, f.n));
  fam["degree"] = f.degree;
  ojson sums = ojson::array();
  for (const auto& c : f.summands) {
    ojson ell = ojson::array();
    for (int i = 0; i < c.ell.size(); ++i) ell.push_back(complex_json(c.ell[i]));
    sums.push_back({{"ell", ell}, {"kappa", c.kappa}});
  }
  fam["summands"] = sums;
  fam["end"] = f.end;
  fam["beta"] = f.beta;
  ojson j;
  j["name"] = cfg.name;
  j["family"] = fam;
  j["backend"] = {{"kind", backend_name(f.backend)}, {"cutoff", f.cutoff}, {"grid", f.grid}};
  j["base_point"] = complex_json(cfg.s0);
  ojson bd = ojson::array();
  for (const auto& [p, q] : cfg.bidegrees) bd.push_back({p, q});
  j["bidegrees"] = bd;
  j["suites"] = cfg.suites;
  const auto& t = cfg.tol;
  j["tolerances"] = {{"identity", t.identity}, {"grid_identity", t.grid_identity}, {"agreement", t.agreement},
                     {"grid_agreement", t.grid_agreement}, {"oracle", t.oracle}, {"grid_oracle", t.grid_oracle},
                     {"hermitian", t.hermitian}, {"bkn", t.bkn}, {"grid_bkn", t.grid_bkn}, {"wp_norm", t.wp_norm},
                     {"wp", t.wp}, {"gauge", t.gauge}};
  ojson ex = ojson::array();
  for (const auto& e : cfg.expected)
    ex.push_back({{"bidegree", {e.p, e.q}}, {"normalized", e.normalized}, {"tolerance", e.tolerance}});
  j["expected"] = ex;
  j["gauge_shifts"] = cfg.gauge_shifts;
  j["fd_step"] = cfg.fd_step;
  j["line_shift"] = cfg.line_shift;
  j["seed"] = cfg.seed;
  j["identity_seeds"] = cfg.identity_seeds;
  j["max_mode"] = cfg.max_mode;
  return j;
}

ojson to_json(const RunReport& report) {
  ojson j;
  j["version"] = version_string();
  j["config"] = config_json(report.config);
  j["tolerance_scale"] = report.tolerance_scale;
  ojson suites = ojson::array();
  for (const auto& s : report.suites) {
    ojson sj;
    sj["name"] = s.name;
    sj["status"] = s.status;
    if (!s.error.empty()) sj["error"] = s.error;
    ojson checks = ojson::array();
    for (const auto& c : s.checks) {
      ojson cj{{"check", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}};
      if (!c.note.empty()) cj["note"] = c.note;
      checks.push_back(cj);
    }
    sj["checks"] = checks;
    sj["details"] = s.details;
    suites.push_back(sj);
  }
  j["suites"] = suites;
  j["pass"] = report.pass();
  return j;
}

std::string to_csv(const RunReport& report) {
  std::string out = "suite,check,value,tolerance,pass\n";
  char buf[64];
  for (const auto& s : report.suites)
    for (const auto& c : s.checks) {
      out += s.name + ",\"" + c.name + "\",";
      std::snprintf(buf, sizeof buf, "%.17g", c.value);
      out += buf;
      std::snprintf(buf, sizeof buf, ",%.17g,", c.tolerance);
      out += buf;
      out += c.pass ? "true\n" : "false\n";
    }
  return out;
}

void emit(const RunReport& report, const std::string& path, const std::string& format) {
  std::string text;
  if (format == "json") text = to_json(report).dump(2) + "\n";
  else if (format == "csv") text = to_csv(report);
  else fail(ErrorCode::ConfigError, "unknown format " + format);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

ojson describe_family(const ExperimentConfig& cfg) {
  const HorizontalData hd = horizontal_data(cfg.family, cfg.s0);
  ojson j;
  j["family"] = config_json(cfg)["family"];
  j["tau"] = matrix_json(hd.tau);
  j["tau_prime"] = matrix_json(hd.tau_prime);
  j["c"] = hd.c;
  j["flat_fibers"] = hd.space()->flat();
  j["product"] = is_product_family(cfg.family);
  ojson ranks = ojson::array();
  for (int p = 0; p <= cfg.family.n; ++p)
    for (int q = 0; q <= cfg.family.n; ++q) {
      const int r = expected_rank(cfg.family, p, q);
      ojson e{{"bidegree", {p, q}}, {"rank", r}};
      if (r > 0) e["evaluators"] = applicable_evaluators(hd, p, q);
      ranks.push_back(e);
    }
  j["direct_images"] = ranks;
  return j;
}

std::vector<std::string> diff_reports(const nlohmann::json& a, const nlohmann::json& b) {
  std::vector<std::string> out;
  for (const auto& op : nlohmann::json::diff(a, b)) out.push_back(op["op"].get<std::string>() + " " + op["path"].get<std::string>());
  return out;
}

}  // namespace hodgelab
