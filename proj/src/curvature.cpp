#include "hodgelab/curvature.hpp"

#include <cmath>
#include <functional>

#include "hodgelab/errors.hpp"

namespace hodgelab {

double CurvatureReport::normalized() const {
  if (value.rows() != 1) fail(ErrorCode::Precondition, "normalized curvature needs a rank-1 frame");
  return value(0, 0).real() / gram(0, 0).real();
}

double CurvatureReport::bookkeeping_defect() const {
  CMat sum = CMat::Zero(value.rows(), value.cols());
  for (const auto& t : terms) sum += t.second;
  return (sum - value).cwiseAbs().maxCoeff();
}

double CurvatureReport::hermitian_defect() const { return (value - value.adjoint()).cwiseAbs().maxCoeff(); }

namespace {

bool empty(const PQForm& f) { return !f.valid() || f.nI() == 0 || f.nJ() == 0; }

cplx inner(const PQForm& a, const PQForm& b) {
  if (empty(a) || empty(b)) return 0.0;
  return l2_inner(a, b);
}

PQForm safe_green(const PQForm& f, const SolverOptions& opt) { return empty(f) ? f : green(f, Which::Dbar, opt); }

PQForm safe_harmonic(const PQForm& f, const SolverOptions& opt) {
  return empty(f) ? f : harmonic_projection(f, Which::Dbar, opt);
}

void check_gram(const CMat& gram) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (gram + gram.adjoint()));
  const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e8) fail(ErrorCode::IllConditionedGram, "Gram matrix condition number exceeds 1e8");
}

std::vector<PQForm> frame_values(const HarmonicFrame& frame) {
  if (frame.members.empty()) fail(ErrorCode::RankZero, "empty frame");
  std::vector<PQForm> out;
  for (const auto& m : frame.members) out.push_back(m.value);
  return out;
}

CMat pair_matrix(const std::vector<PQForm>& a, const std::vector<PQForm>& b) {
  const int r = static_cast<int>(a.size());
  CMat M(r, r);
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l) M(k, l) = inner(a[k], b[l]);
  return M;
}

std::vector<PQForm> map_forms(const std::vector<PQForm>& in, const std::function<PQForm(const PQForm&)>& fn) {
  std::vector<PQForm> out;
  for (const auto& f : in) out.push_back(fn(f));
  return out;
}

CurvatureReport start_report(const std::string& name, const HarmonicFrame& frame) {
  check_gram(frame.gram);
  CurvatureReport rep;
  rep.evaluator = name;
  rep.p = frame.p;
  rep.q = frame.q;
  rep.gram = frame.gram;
  rep.value = CMat::Zero(frame.rank(), frame.rank());
  return rep;
}

void add_term(CurvatureReport& rep, const std::string& name, const CMat& m) {
  rep.terms.emplace_back(name, m);
  rep.value += m;
}

// sum_a dc_a dz^a ^ psi for a scalar function with constant (1,0) differential.
PQForm scalar_wedge10(const CVec& dc, const PQForm& psi) {
  PQForm out(psi.space(), psi.p() + 1, psi.q());
  for (int a = 0; a < dc.size(); ++a)
    if (dc[a] != cplx(0.0)) axpy(out, dc[a], wedge_dz(psi, a));
  return out;
}

// ---- fiber-constant End-valued forms ----

EndForm end_wedge(const EndForm& a, const EndForm& b) {
  const int n = a.n;
  EndForm out = EndForm::zero(n, a.p + b.p, a.q + b.q, a.summands());
  if (a.p + b.p > n || a.q + b.q > n) return out;
  const auto &SA = subsets(n, a.p), &SB = subsets(n, a.q), &SC = subsets(n, b.p), &SD = subsets(n, b.q);
  const int cross = (a.q * b.p) % 2 ? -1 : 1;  // dzbar^B past dz^C
  for (int i = 0; i < a.summands(); ++i)
    for (std::size_t A = 0; A < SA.size(); ++A)
      for (std::size_t B = 0; B < SB.size(); ++B)
        for (std::size_t C = 0; C < SC.size(); ++C)
          for (std::size_t D = 0; D < SD.size(); ++D) {
            if ((SA[A] & SC[C]) || (SB[B] & SD[D])) continue;
            const int sign = cross * merge_sign(SA[A], SC[C]) * merge_sign(SB[B], SD[D]);
            out.coef[i](subset_index(n, SA[A] | SC[C]), subset_index(n, SB[B] | SD[D])) +=
                static_cast<double>(sign) * a.coef[i](A, B) * b.coef[i](C, D);
          }
  return out;
}

EndForm end_axpby(cplx x, const EndForm& a, cplx y, const EndForm& b) {
  EndForm out = a;
  for (int i = 0; i < a.summands(); ++i) out.coef[i] = x * a.coef[i] + y * b.coef[i];
  return out;
}

// Graded commutator [a, b] = a ^ b - (-1)^{|a||b|} b ^ a, summand by summand.
EndForm end_commutator(const EndForm& a, const EndForm& b) {
  const int sign = ((a.p + a.q) * (b.p + b.q)) % 2 ? -1 : 1;
  return end_axpby(1.0, end_wedge(a, b), -static_cast<double>(sign), end_wedge(b, a));
}

EndForm conj_type_zero(const EndForm& like, int p, int q) { return EndForm::zero(like.n, p, q, like.summands()); }

// Read back a fiber-constant End-valued field that is diagonal in the summands.
EndForm from_field(const PQForm& f) {
  const FieldSpace& sp = f.sp();
  const BundleData& b = sp.bundle();
  const int r = b.end ? b.rank() : f.comps();
  EndForm e = EndForm::zero(f.n(), f.p(), f.q(), r);
  if (empty(f)) return e;
  for (int c = 0; c < f.comps(); ++c) {
    if (b.end && b.summand_left(c) != b.summand_right(c)) continue;
    const int i = b.end ? b.summand_left(c) : c;
    for (int I = 0; I < f.nI(); ++I)
      for (int J = 0; J < f.nJ(); ++J) e.coef[i](I, J) = sp.constant_part(f.field(I, J, c));
  }
  const double resid = (f - materialize(e, f.space())).max_abs();
  if (resid > 1e-9 * (1.0 + f.max_abs())) fail(ErrorCode::Unsupported, "End-valued field is not a diagonal constant");
  return e;
}

EndForm end_apply(const EndForm& e, const SpacePtr& sp, const std::function<PQForm(const PQForm&)>& op) {
  PQForm m = materialize(e, sp);
  if (empty(m)) return e;
  return from_field(op(m));
}

EndForm end_lambda(const EndForm& e, const SpacePtr& sp) {
  if (e.p == 0 || e.q == 0) return conj_type_zero(e, e.p - 1, e.q - 1);
  return end_apply(e, sp, [](const PQForm& x) { return lambda(x); });
}

EndForm end_scale(cplx s, const EndForm& e) { return end_axpby(s, e, 0.0, e); }

double parallel_defect(const PQForm& E) {
  const FieldSpace& sp = E.sp();
  std::vector<cplx> buf(E.npts());
  double worst = 0.0;
  for (int c = 0; c < E.comps(); ++c)
    for (int I = 0; I < E.nI(); ++I)
      for (int J = 0; J < E.nJ(); ++J)
        for (int a = 0; a < E.n(); ++a) {
          sp.holo(a, c, E.field(I, J, c), buf.data());
          for (auto z : buf) worst = std::max(worst, std::abs(z));
          sp.antiholo(a, c, E.field(I, J, c), buf.data());
          for (auto z : buf) worst = std::max(worst, std::abs(z));
        }
  return worst;
}

bool is_trivial_untwisted(const HorizontalData& hd) {
  return hd.family.kind == FamilyKind::ComplexStructure && hd.state.bundle.kind == BundleKind::Trivial;
}

}  // namespace

cplx lie_commutator_pairing(const HorizontalData& hd, const PQForm& chi, const PQForm& psi) {
  const double c = hd.c;
  const CVec dc = CVec::Zero(hd.n());  // c(omega) is fiber-constant, checked in horizontal_data
  cplx total = c * inner(laplacian(chi, Which::Del), psi);
  total -= c * inner(del_h(chi, false), del_h(psi, false));
  total -= c * inner(del_star(chi, false), del_star(psi, false));
  if (dc.norm() > 0.0) {
    total += inner(chi, scalar_wedge10(dc.conjugate(), del_star(psi, false)));
    total += inner(scalar_wedge10(dc, del_star(chi, false)), psi);
  }
  return total;
}

PQForm lambda_eta_commutator(const HorizontalData& hd, const PQForm& psi) {
  const EndForm ieta = end_scale(kI, hd.eta_sbar);
  return lambda(wedge_end(ieta, psi), false) - wedge_end(ieta, lambda(psi, false));
}

PQForm w_s(const HorizontalData& hd, const PQForm& psi) {
  return cup_soft(hd.A, del_h(psi, false)) - del_h(cup_soft(hd.A, psi), false) + wedge_end(hd.eta_s, psi);
}

PQForm w_sbar(const HorizontalData& hd, const PQForm& psi) {
  const double sign = psi.p() % 2 ? -1.0 : 1.0;
  PQForm out = del_star(cup_soft(hd.Abar, psi), false) + cup_soft(hd.Abar, del_star(psi, false));
  out *= sign;
  return out + lambda_eta_commutator(hd, psi);
}

CurvatureReport curvature_main(const HorizontalData& hd, const HarmonicFrame& frame, const SolverOptions& opt) {
  CurvatureReport rep = start_report("main", frame);
  const auto psi = frame_values(frame);
  const int r = frame.rank();
  CMat lie(r, r);
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l) lie(k, l) = lie_commutator_pairing(hd, psi[k], psi[l]);
  add_term(rep, "lie_commutator", lie);
  add_term(rep, "theta_vv", pair_matrix(map_forms(psi, [&](const PQForm& x) { return wedge_end(hd.theta_vv, x); }), psi));
  const auto ws = map_forms(psi, [&](const PQForm& x) { return w_s(hd, x); });
  const auto wsb = map_forms(psi, [&](const PQForm& x) { return w_sbar(hd, x); });
  add_term(rep, "green_ws", -pair_matrix(map_forms(ws, [&](const PQForm& x) { return safe_green(x, opt); }), ws));
  add_term(rep, "green_wsbar", pair_matrix(map_forms(wsb, [&](const PQForm& x) { return safe_green(x, opt); }), wsb));
  const auto as = map_forms(psi, [&](const PQForm& x) { return cup_soft(hd.A, x); });
  const auto asb = map_forms(psi, [&](const PQForm& x) { return cup_soft(hd.Abar, x); });
  add_term(rep, "cup_s", pair_matrix(as, as));
  add_term(rep, "cup_sbar", -pair_matrix(asb, asb));
  return rep;
}

CurvatureReport curvature_griffiths(const HorizontalData& hd, const HarmonicFrame& frame, const SolverOptions& opt) {
  if (!is_trivial_untwisted(hd)) fail(ErrorCode::NotUntwisted, "Griffiths formula needs the trivial bundle");
  CurvatureReport rep = start_report("griffiths", frame);
  const auto psi = frame_values(frame);
  const auto ha = map_forms(psi, [&](const PQForm& x) { return safe_harmonic(cup_soft(hd.A, x), opt); });
  const auto hab = map_forms(psi, [&](const PQForm& x) { return safe_harmonic(cup_soft(hd.Abar, x), opt); });
  add_term(rep, "harmonic_cup_s", pair_matrix(ha, ha));
  add_term(rep, "harmonic_cup_sbar", -pair_matrix(hab, hab));
  return rep;
}

CurvatureReport curvature_line_p0(const HorizontalData& hd, const HarmonicFrame& frame, const LineOptions& lopt,
                                  const SolverOptions& opt) {
  const auto& f = hd.family;
  if (f.kind != FamilyKind::Theta || f.degree <= 0 || frame.q != 0 || f.beta != 0.0)
    fail(ErrorCode::Precondition, "line_p0 needs a fiberwise positive line bundle with omega = i Theta and q = 0");
  CurvatureReport rep = start_report("line_p0", frame);
  const auto psi = frame_values(frame);
  const double m = hd.n() - frame.p + 1;
  const double c = hd.c;
  const auto dpsi = map_forms(psi, [&](const PQForm& x) { return del_h(x, false); });
  add_term(rep, "c_psi", m * c * pair_matrix(psi, psi));
  add_term(rep, "c_dpsi", -c * pair_matrix(dpsi, dpsi));
  const auto as = map_forms(psi, [&](const PQForm& x) { return cup_soft(hd.A, x); });
  const auto shifted = map_forms(as, [&](const PQForm& x) {
    return empty(x) ? x : shifted_inverse(x, lopt.shift, Which::Dbar, opt);
  });
  add_term(rep, "shifted_cup", m * pair_matrix(shifted, as));
  const auto adp = map_forms(dpsi, [&](const PQForm& x) { return cup_soft(hd.A, x); });
  double leak = 0.0;
  for (const auto& x : adp) {
    if (empty(x)) continue;
    const double nx = l2_norm(x);
    if (nx == 0.0) continue;
    leak = std::max(leak, l2_norm(safe_harmonic(x, opt)) / nx);
  }
  rep.diagnostics.emplace_back("harmonic_leak", leak);
  if (leak > lopt.leak_tolerance) fail(ErrorCode::HarmonicLeak, "A cup d psi has a harmonic component " + std::to_string(leak));
  add_term(rep, "green_cup_dpsi", -pair_matrix(map_forms(adp, [&](const PQForm& x) { return safe_green(x, opt); }), adp));
  return rep;
}

CurvatureReport curvature_line_nq(const HorizontalData& hd, const HarmonicFrame& frame, const SolverOptions& opt) {
  const auto& f = hd.family;
  if (f.kind != FamilyKind::Theta || f.degree >= 0 || frame.p != hd.n() || f.beta != 0.0)
    fail(ErrorCode::Precondition, "line_nq needs a fiberwise negative line bundle with omega = -i Theta and p = n");
  CurvatureReport rep = start_report("line_nq", frame);
  const auto psi = frame_values(frame);
  const int q = frame.q;
  const double c = hd.c;
  const auto dspsi = map_forms(psi, [&](const PQForm& x) { return del_star(x, false); });
  add_term(rep, "c_psi", (q - 1) * c * pair_matrix(psi, psi));
  add_term(rep, "c_dstar_psi", c * pair_matrix(dspsi, dspsi));
  const auto as = map_forms(psi, [&](const PQForm& x) { return cup_soft(hd.A, x); });
  const auto shifted = map_forms(as, [&](const PQForm& x) {
    return empty(x) ? x : shifted_inverse(x, -1.0, Which::Dbar, opt);
  });
  add_term(rep, "shifted_cup", -static_cast<double>(q + 1) * pair_matrix(shifted, as));
  const auto abd = map_forms(dspsi, [&](const PQForm& x) { return cup_soft(hd.Abar, x); });
  add_term(rep, "green_cupbar_dstar_psi", pair_matrix(map_forms(abd, [&](const PQForm& x) { return safe_green(x, opt); }), abd));
  return rep;
}

CurvatureReport curvature_flat(const HorizontalData& hd, const HarmonicFrame& frame, const FlatOptions& fopt,
                               const SolverOptions& opt) {
  if (!hd.space()->flat()) fail(ErrorCode::NotFiberwiseFlat, "bundle is not flat on fibers");
  const SpacePtr esp = end_space(hd.state, hd.family);
  const PQForm E_s = fopt.eta_override ? *fopt.eta_override : materialize(hd.eta_s, esp);
  const double par = parallel_defect(E_s);
  if (par > fopt.parallel_tolerance) fail(ErrorCode::NotParallel, "eta_s is not fiberwise parallel: " + std::to_string(par));
  CurvatureReport rep = start_report("flat", frame);
  rep.diagnostics.emplace_back("parallel_defect", par);
  const auto psi = frame_values(frame);

  const auto green_end = [&](const EndForm& e) { return end_apply(e, esp, [&](const PQForm& x) { return safe_green(x, opt); }); };
  const auto harm_end = [&](const EndForm& e) { return end_apply(e, esp, [&](const PQForm& x) { return safe_harmonic(x, opt); }); };

  EndForm X = end_scale(kI, end_lambda(end_commutator(hd.eta_s, hd.eta_sbar), esp));
  const EndForm i2 = end_apply(hd.eta_sbar, esp, [&](const PQForm& x) { return dbar_star(cup_soft(hd.A, x), false); });
  const EndForm i3 = end_apply(hd.eta_s, esp, [&](const PQForm& x) { return del_star(cup_soft(hd.Abar, x), false); });
  X = end_axpby(1.0, end_axpby(1.0, X, 1.0, i2), 1.0, i3);
  const EndForm GX = green_end(X);
  const EndForm Hvv = harm_end(hd.theta_vv);
  add_term(rep, "harmonic_theta_vv", pair_matrix(map_forms(psi, [&](const PQForm& x) { return wedge_end(Hvv, x); }), psi));
  add_term(rep, "green_end", pair_matrix(map_forms(psi, [&](const PQForm& x) { return wedge_end(GX, x); }), psi));
  const auto ha = map_forms(psi, [&](const PQForm& x) { return safe_harmonic(cup_soft(hd.A, x), opt); });
  const auto hab = map_forms(psi, [&](const PQForm& x) { return safe_harmonic(cup_soft(hd.Abar, x), opt); });
  add_term(rep, "harmonic_cup_s", pair_matrix(ha, ha));
  add_term(rep, "harmonic_cup_sbar", -pair_matrix(hab, hab));
  return rep;
}

CurvatureReport curvature_he(const HorizontalData& hd, const HarmonicFrame& frame, const SolverOptions& opt) {
  if (!is_product_family(hd.family)) fail(ErrorCode::NotProductFamily, "HE formula needs a product family");
  if (!hd.space()->flat()) fail(ErrorCode::Unsupported, "HE evaluator is implemented for flat fibers");
  CurvatureReport rep = start_report("he", frame);
  const SpacePtr esp = end_space(hd.state, hd.family);
  const auto psi = frame_values(frame);
  const EndForm Hss = end_apply(hd.theta_ss, esp, [&](const PQForm& x) { return safe_harmonic(x, opt); });
  const EndForm X = end_scale(kI, end_lambda(end_commutator(hd.eta_s, hd.eta_sbar), esp));
  const EndForm GX = end_apply(X, esp, [&](const PQForm& x) { return safe_green(x, opt); });
  add_term(rep, "harmonic_theta_ss", pair_matrix(map_forms(psi, [&](const PQForm& x) { return wedge_end(Hss, x); }), psi));
  add_term(rep, "green_lambda_eta", pair_matrix(map_forms(psi, [&](const PQForm& x) { return wedge_end(GX, x); }), psi));
  const auto ew = map_forms(psi, [&](const PQForm& x) { return wedge_end(hd.eta_s, x); });
  add_term(rep, "green_eta_wedge", -pair_matrix(map_forms(ew, [&](const PQForm& x) { return safe_green(x, opt); }), ew));
  const auto le = map_forms(psi, [&](const PQForm& x) { return lambda_eta_commutator(hd, x); });
  add_term(rep, "green_lambda_eta_bar", pair_matrix(map_forms(le, [&](const PQForm& x) { return safe_green(x, opt); }), le));
  return rep;
}

WPReport wp_suite(const HorizontalData& hd, const SolverOptions& opt) {
  if (!is_product_family(hd.family)) fail(ErrorCode::NotProductFamily, "WP suite needs a product family");
  if (!hd.space()->flat()) fail(ErrorCode::NotFiberwiseFlat, "WP suite needs fiberwise flat bundles");
  const SpacePtr esp = end_space(hd.state, hd.family);
  const int n = hd.n();
  WPReport wp;
  const auto green_field = [&](const EndForm& e) { return safe_green(materialize(e, esp), opt); };
  const auto pair_green = [&](const EndForm& a, const EndForm& b) {
    const PQForm mb = materialize(b, esp);
    return inner(green_field(a), mb).real();
  };

  const PQForm E_s = materialize(hd.eta_s, esp);
  wp.norm_direct = inner(E_s, E_s).real();
  const EndForm W = end_scale(kI, end_lambda(end_wedge(hd.eta_s, hd.eta_sbar), esp));
  double sum = 0.0;
  for (const auto& c : W.coef) sum += c(0, 0).real();
  wp.norm_lambda = sum * esp->fiber().volume();

  const EndForm X1 = end_scale(kI, end_lambda(end_commutator(hd.eta_s, hd.eta_sbar), esp));
  const EndForm kappa = hd.eta_s, kappa_bar = hd.eta_sbar;
  const EndForm K1 = end_scale(kI, end_lambda(end_commutator(kappa, kappa_bar), esp));
  const EndForm C2 = end_commutator(hd.eta_s, kappa);
  const EndForm C3 = end_scale(kI, end_lambda(end_commutator(hd.eta_sbar, kappa), esp));
  wp.curv_wp_terms = {{"green_lambda_eta", pair_green(X1, K1)}, {"green_commutator", -pair_green(C2, C2)},
                      {"green_lambda_eta_bar", pair_green(C3, C3)}};
  for (const auto& t : wp.curv_wp_terms) wp.curv_wp += t.second;

  const EndForm GX1 = end_apply(X1, esp, [&](const PQForm& x) { return safe_green(x, opt); });
  const EndForm Hss = end_apply(hd.theta_ss, esp, [&](const PQForm& x) { return safe_harmonic(x, opt); });
  EndForm power = hd.eta_s;
  for (int q = 1; q <= n; ++q) {
    if (q > 1) power = end_wedge(power, hd.eta_s);
    const PQForm P = materialize(power, esp);
    const EndForm Z = end_scale(kI, end_lambda(end_commutator(hd.eta_sbar, power), esp));
    wp.curvflat.push_back(inner(wedge_end(GX1, P), P).real() + pair_green(Z, Z));
    wp.harmonic_defect.push_back(empty(P) ? 0.0 : l2_norm(laplacian(P)));
    wp.he_drop.push_back(std::abs(inner(wedge_end(Hss, P), P)));
  }
  const EndForm eta2 = end_scale(0.5, end_commutator(hd.eta_s, hd.eta_s));
  const PQForm E2 = materialize(eta2, esp);
  wp.eta2_harmonic_defect = empty(E2) ? 0.0 : l2_norm(laplacian(E2));
  const EndForm S = end_scale(kI, end_lambda(end_commutator(hd.eta_sbar, hd.eta_s), esp));
  wp.sectional = 2.0 * pair_green(S, S);
  wp.semipositive = wp.sectional >= -1e-12;
  return wp;
}

std::vector<std::string> applicable_evaluators(const HorizontalData& hd, int p, int q) {
  const auto& f = hd.family;
  std::vector<std::string> out{"main"};
  if (is_trivial_untwisted(hd)) out.push_back("griffiths");
  if (f.kind == FamilyKind::Theta && f.degree > 0 && q == 0 && f.beta == 0.0) out.push_back("line_p0");
  if (f.kind == FamilyKind::Theta && f.degree < 0 && p == hd.n() && f.beta == 0.0) out.push_back("line_nq");
  if (hd.space()->flat()) out.push_back("flat");
  if (is_product_family(f) && hd.space()->flat()) out.push_back("he");
  return out;
}

CurvatureReport evaluate(const std::string& name, const HorizontalData& hd, const HarmonicFrame& frame,
                         const SolverOptions& opt) {
  if (name == "main") return curvature_main(hd, frame, opt);
  if (name == "griffiths") return curvature_griffiths(hd, frame, opt);
  if (name == "line_p0") return curvature_line_p0(hd, frame, {}, opt);
  if (name == "line_nq") return curvature_line_nq(hd, frame, opt);
  if (name == "flat") return curvature_flat(hd, frame, {}, opt);
  if (name == "he") return curvature_he(hd, frame, opt);
  fail(ErrorCode::ConfigError, "unknown evaluator " + name);
}

}  // namespace hodgelab
