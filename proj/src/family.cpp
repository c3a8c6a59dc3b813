#include "hodgelab/family.hpp"

#include <cmath>

#include "hodgelab/errors.hpp"

namespace hodgelab {

const char* family_kind_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::ComplexStructure: return "complex_structure";
    case FamilyKind::Theta: return "theta";
    case FamilyKind::Character: return "character";
  }
  return "unknown";
}

void validate_family(const FamilyDescriptor& f) {
  if (f.n != 1 && f.n != 2) fail(ErrorCode::Unsupported, "family fiber dimension must be 1 or 2");
  if (f.tau0.rows() != f.n || f.tau0.cols() != f.n) fail(ErrorCode::ShapeMismatch, "tau0 must be n x n");
  if (f.tau1.size() != 0 && (f.tau1.rows() != f.n || f.tau1.cols() != f.n))
    fail(ErrorCode::ShapeMismatch, "tau1 must be n x n");
  if ((f.tau0 - f.tau0.transpose()).norm() > 1e-14) fail(ErrorCode::Precondition, "tau0 must be symmetric");
  if (f.tau1.size() != 0 && (f.tau1 - f.tau1.transpose()).norm() > 1e-14)
    fail(ErrorCode::Precondition, "tau1 must be symmetric");
  switch (f.kind) {
    case FamilyKind::ComplexStructure:
      break;
    case FamilyKind::Theta:
      if (f.n != 1) fail(ErrorCode::Unsupported, "theta families are implemented for n = 1");
      if (f.degree == 0) fail(ErrorCode::InconsistentAutomorphy, "theta family needs a nonzero degree");
      if (f.backend != Backend::Grid) fail(ErrorCode::Unsupported, "theta families need the grid backend");
      if (f.grid < 8 * std::abs(f.degree)) fail(ErrorCode::Precondition, "grid resolution must be at least 8 |d|");
      break;
    case FamilyKind::Character:
      if (f.summands.empty()) fail(ErrorCode::Precondition, "character family needs at least one summand");
      if (f.tau1.size() != 0 && f.tau1.norm() != 0.0)
        fail(ErrorCode::Precondition, "character families have a fixed fiber");
      for (const auto& c : f.summands)
        if (c.ell.size() != f.n) fail(ErrorCode::ShapeMismatch, "character slope must have n entries");
      break;
  }
  if (f.backend == Backend::Grid && f.n != 1) fail(ErrorCode::Unsupported, "grid backend is implemented for n = 1");
  if (f.backend == Backend::Fourier && f.cutoff < 1) fail(ErrorCode::Precondition, "Fourier cutoff must be positive");
}

namespace {

CMat tau_prime(const FamilyDescriptor& f) {
  if (f.kind == FamilyKind::Character || f.tau1.size() == 0) return CMat::Zero(f.n, f.n);
  return f.tau1;
}

RMat im_inverse(const CMat& tau) {
  RMat im = tau.imag();
  return im.inverse();
}

CVec complexify(const RVec& w) { return w.cast<cplx>(); }

}  // namespace

CMat tau_at(const FamilyDescriptor& f, cplx s) { return f.tau0 + s * tau_prime(f); }

double metric_scale(const FamilyDescriptor& f) {
  return f.kind == FamilyKind::Theta ? 2.0 * kPi * std::abs(f.degree) : 1.0;
}

bool is_product_family(const FamilyDescriptor& f) { return tau_prime(f).norm() == 0.0; }

FiberState fiber_state(const FamilyDescriptor& f, cplx s) {
  validate_family(f);
  const CMat tau = tau_at(f, s);
  Eigen::SelfAdjointEigenSolver<RMat> eig(RMat(tau.imag()));
  if (eig.eigenvalues().minCoeff() <= 0.0) fail(ErrorCode::DegenerateFiber, "Im tau(s) is not positive definite");
  const CMat metric = (0.5 * metric_scale(f) * im_inverse(tau)).cast<cplx>();
  FiberState st;
  st.fiber = build_fiber(Lattice{f.n, tau}, metric);
  switch (f.kind) {
    case FamilyKind::ComplexStructure:
      st.bundle = trivial_bundle();
      break;
    case FamilyKind::Theta:
      st.bundle = automorphy_bundle(f.degree);
      break;
    case FamilyKind::Character: {
      std::vector<RVec> chis;
      for (const auto& c : f.summands) chis.push_back(character_from_dbar_shift(st.fiber, s * c.ell.conjugate()));
      st.bundle = character_sum(chis);
      if (f.end) st.bundle = end_bundle(st.bundle);
      break;
    }
  }
  st.space = f.backend == Backend::Fourier ? make_fourier_space(st.fiber, st.bundle, f.cutoff)
                                           : make_grid_space(st.fiber, st.bundle, f.grid);
  return st;
}

SpacePtr end_space(const FiberState& st, const FamilyDescriptor& f) {
  if (st.bundle.end || st.bundle.kind == BundleKind::Trivial) return st.space;
  const BundleData e = end_bundle(st.bundle);
  return f.backend == Backend::Fourier ? make_fourier_space(st.fiber, e, f.cutoff) : make_grid_space(st.fiber, e, f.grid);
}

CMat total_metric(const FamilyDescriptor& f, cplx s, const RVec& w) {
  const int n = f.n;
  const double scale = metric_scale(f);
  const CMat P = im_inverse(tau_at(f, s)).cast<cplx>();
  const CMat tp = tau_prime(f);
  const CMat tpb = tp.conjugate();
  const CVec W = complexify(w);
  CMat G = CMat::Zero(n + 1, n + 1);
  G.block(1, 1, n, n) = 0.5 * scale * P;
  const CVec gs = -0.5 * scale * (P * tp * P * W);
  const CVec gsb = -0.5 * scale * (P * tpb * P * W);
  for (int b = 0; b < n; ++b) {
    G(0, 1 + b) = gs[b];
    G(1 + b, 0) = gsb[b];
  }
  const CMat M = P * tpb * P * tp * P + P * tp * P * tpb * P;
  G(0, 0) = 0.25 * scale * (W.transpose() * M * W)(0, 0) + f.beta;
  return G;
}

std::vector<CMat> total_curvature(const FamilyDescriptor& f, cplx s, const RVec& w) {
  const int n = f.n;
  std::vector<CMat> out;
  switch (f.kind) {
    case FamilyKind::ComplexStructure:
      out.push_back(CMat::Zero(n + 1, n + 1));
      break;
    case FamilyKind::Theta: {
      FamilyDescriptor unit = f;
      unit.beta = 0.0;
      CMat hess = total_metric(unit, s, w) / metric_scale(f);
      out.push_back(2.0 * kPi * static_cast<double>(f.degree) * hess);
      break;
    }
    case FamilyKind::Character:
      for (const auto& c : f.summands) {
        CMat T = CMat::Zero(n + 1, n + 1);
        T(0, 0) = c.kappa;
        for (int a = 0; a < n; ++a) {
          T(0, 1 + a) = std::conj(c.ell[a]);
          T(1 + a, 0) = c.ell[a];
        }
        out.push_back(T);
      }
      break;
  }
  return out;
}

std::vector<RVec> fiber_samples(int n) {
  std::vector<RVec> out;
  const double pts[] = {0.0, 0.37, -0.81, 1.3};
  if (n == 1) {
    for (double a : pts) out.push_back((RVec(1) << a).finished());
  } else {
    for (double a : pts)
      for (double b : pts) out.push_back((RVec(2) << a, 0.5 * b - 0.2).finished());
  }
  return out;
}

namespace {

// Schur complement G_ss - G_s. g^{-1} G_.s of the total metric.
cplx schur(const CMat& G, int n) {
  const CMat g = G.block(1, 1, n, n);
  const CMat row = G.block(0, 1, 1, n);
  const CMat col = G.block(1, 0, n, 1);
  return G(0, 0) - (row * g.inverse() * col)(0, 0);
}

CVec lift_coefficients(const HorizontalData& hd, const RVec& w) { return hd.a_map * complexify(w); }

// Theta(v, vbar), eta_s, eta_sbar of one summand at a sample point.
struct PointCurvature {
  cplx vv;
  CVec eta_s;
  CVec eta_sbar;
};

PointCurvature point_curvature(const CMat& T, const CVec& a) {
  const int n = static_cast<int>(a.size());
  CVec v(n + 1), vb(n + 1);
  v[0] = 1.0;
  v.tail(n) = a;
  vb = v.conjugate();
  PointCurvature pc;
  pc.vv = (v.transpose() * T * vb)(0, 0);
  pc.eta_s = CVec(n);
  pc.eta_sbar = CVec(n);
  for (int b = 0; b < n; ++b) {
    cplx t = T(0, 1 + b);
    for (int al = 0; al < n; ++al) t += a[al] * T(1 + al, 1 + b);
    pc.eta_s[b] = -t;
  }
  for (int al = 0; al < n; ++al) {
    cplx t = T(1 + al, 0);
    for (int b = 0; b < n; ++b) t += std::conj(a[b]) * T(1 + al, 1 + b);
    pc.eta_sbar[al] = t;
  }
  return pc;
}

}  // namespace

HorizontalData horizontal_data(const FamilyDescriptor& f, cplx s) {
  HorizontalData hd;
  hd.family = f;
  hd.s = s;
  hd.state = fiber_state(f, s);
  const int n = f.n;
  hd.tau = tau_at(f, s);
  hd.tau_prime = tau_prime(f);
  const CMat& g_inv = hd.state.fiber.g_inv;
  const CMat& dinv = hd.state.fiber.delta_inv;
  hd.K = hd.tau_prime * dinv;
  hd.Kbar = hd.tau_prime.conjugate() * dinv;

  // a^alpha = -g^{bbar alpha} G_{s bbar}; the metric is linear in Im z, so unit vectors give the columns.
  hd.a_map = CMat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    RVec e = RVec::Zero(n);
    e[k] = 1.0;
    const CMat G = total_metric(f, s, e);
    CVec gs(n);
    for (int b = 0; b < n; ++b) gs[b] = G(0, 1 + b);
    hd.a_map.col(k) = -g_inv.transpose() * gs;
  }
  // d(Im z_k)/d zbar_b = (i/2) delta_kb
  hd.A.coef = 0.5 * kI * hd.a_map;
  hd.A.conjugate = false;
  hd.Abar.coef = hd.A.coef.conjugate();
  hd.Abar.conjugate = true;

  const auto samples = fiber_samples(n);
  double c_var = 0.0;
  hd.c = schur(total_metric(f, s, samples.front()), n).real();
  for (const auto& w : samples) {
    const cplx c = schur(total_metric(f, s, w), n);
    c_var = std::max({c_var, std::abs(c.real() - hd.c), std::abs(c.imag())});
  }
  if (c_var > 1e-10 * (1.0 + std::abs(hd.c))) fail(ErrorCode::Precondition, "geodesic curvature is not fiber-constant");

  const int r = f.kind == FamilyKind::Character ? static_cast<int>(f.summands.size()) : 1;
  hd.eta_s = EndForm::zero(n, 0, 1, r);
  hd.eta_sbar = EndForm::zero(n, 1, 0, r);
  hd.theta_vv = EndForm::zero(n, 0, 0, r);
  hd.theta_ss = EndForm::zero(n, 0, 0, r);
  hd.ds_curvature = EndForm::zero(n, 0, 0, r);
  for (int i = 0; i < r; ++i) {
    PointCurvature ref{};
    bool first = true;
    double var = 0.0;
    for (const auto& w : samples) {
      const auto T = total_curvature(f, s, w);
      const PointCurvature pc = point_curvature(T[i], lift_coefficients(hd, w));
      if (first) {
        ref = pc;
        first = false;
        continue;
      }
      var = std::max({var, std::abs(pc.vv - ref.vv), (pc.eta_s - ref.eta_s).cwiseAbs().maxCoeff(),
                      (pc.eta_sbar - ref.eta_sbar).cwiseAbs().maxCoeff()});
    }
    if (var > 1e-10 * (1.0 + std::abs(ref.vv) + ref.eta_s.norm())) fail(ErrorCode::Precondition, "Atiyah data is not fiber-constant");
    hd.theta_vv.coef[i](0, 0) = ref.vv;
    for (int b = 0; b < n; ++b) hd.eta_s.coef[i](0, b) = ref.eta_s[b];
    for (int a = 0; a < n; ++a) hd.eta_sbar.coef[i](a, 0) = ref.eta_sbar[a];
    if (f.kind == FamilyKind::Character) {
      hd.theta_ss.coef[i](0, 0) = f.summands[i].kappa;
      hd.ds_curvature.coef[i](0, 0) = f.summands[i].kappa;
    }
  }
  return hd;
}

double semmes_defect(const HorizontalData& hd, double c_shift) {
  const int n = hd.n();
  const double vol_factor = std::pow(2.0, n) * hd.tau.imag().determinant();
  double worst = 0.0;
  for (const auto& w : fiber_samples(n)) {
    const CMat G = total_metric(hd.family, hd.s, w);
    const cplx lhs = G.determinant();
    const cplx rhs = (hd.c + c_shift) * G.block(1, 1, n, n).determinant();
    worst = std::max(worst, std::abs(lhs - rhs) * vol_factor);
  }
  return worst;
}

double horizontality_defect(const HorizontalData& hd) {
  const int n = hd.n();
  double worst = 0.0;
  for (const auto& w : fiber_samples(n)) {
    const CMat G = total_metric(hd.family, hd.s, w);
    const CVec a = lift_coefficients(hd, w);
    for (int b = 0; b < n; ++b) {
      cplx t = G(0, 1 + b);
      for (int al = 0; al < n; ++al) t += a[al] * G(1 + al, 1 + b);
      worst = std::max(worst, std::abs(t));
    }
  }
  return worst;
}

CVec lift_bracket(const HorizontalData& hd, const RVec& w) {
  // [v, vbar]^alpha = -vbar(a^alpha) with a = tau' P(s) Im z.
  const CMat P = im_inverse(hd.tau).cast<cplx>();
  const CMat tp = hd.tau_prime;
  const CMat tpb = tp.conjugate();
  const CVec W = complexify(w);
  const CMat dsbar_P = P * tpb * P / (2.0 * kI);
  const CVec abar = lift_coefficients(hd, w).conjugate();
  const CVec dsbar_a = tp * dsbar_P * W;
  const CVec dzbar_a = 0.5 * kI * hd.a_map * abar;
  return -(dsbar_a + dzbar_a);
}

double lie_omega_defect(const HorizontalData& hd) {
  const CMat& g = hd.state.fiber.g;
  const CMat P = im_inverse(hd.tau).cast<cplx>();
  const CMat ds_P = -P * (hd.tau_prime / (2.0 * kI)) * P;
  const CMat ds_g = 0.5 * metric_scale(hd.family) * ds_P;
  const CMat Kg = hd.K.transpose() * g;
  const double c11 = (ds_g + Kg).cwiseAbs().maxCoeff();
  const double c02 = (Kg - Kg.transpose()).cwiseAbs().maxCoeff();
  return std::max(c11, c02);
}

PQForm holo_derivation(const PQForm& psi, const CMat& T) {
  PQForm out(psi.space(), psi.p(), psi.q());
  const int n = psi.n();
  for (int a = 0; a < n; ++a) {
    PQForm ins = contract_dz(psi, a);
    for (int b = 0; b < n; ++b)
      if (T(a, b) != cplx(0.0)) axpy(out, T(a, b), wedge_dz(ins, b));
  }
  return out;
}

PQForm antiholo_derivation(const PQForm& psi, const CMat& T) {
  PQForm out(psi.space(), psi.p(), psi.q());
  const int n = psi.n();
  for (int a = 0; a < n; ++a) {
    PQForm ins = iota_bar(psi, a);
    for (int b = 0; b < n; ++b)
      if (T(a, b) != cplx(0.0)) axpy(out, T(a, b), wedge_dzbar(ins, b));
  }
  return out;
}

LieComponents lie_components(const HorizontalData& hd, const Representative& rep) {
  if (!rep.analytic || !rep.ds.valid() || !rep.dsbar.valid())
    fail(ErrorCode::MissingSDerivative, "representative has no analytic s-dependence");
  rep.value.require_compatible(rep.ds, "lie_components");
  rep.value.require_compatible(rep.dsbar, "lie_components");
  const double sign = (rep.value.p() % 2) ? -1.0 : 1.0;
  LieComponents lc;
  lc.lv1 = rep.ds + holo_derivation(rep.value, hd.K);
  lc.lv2 = cup_soft(hd.A, rep.value);
  lc.lvb1 = rep.dsbar + antiholo_derivation(rep.value, -hd.Kbar);
  lc.lvb2 = sign * cup_soft(hd.Abar, rep.value);
  return lc;
}

PQForm materialize(const EndForm& e, const SpacePtr& space) {
  const BundleData& b = space->bundle();
  std::vector<CMat> coef;
  const int nI = binom(e.n, e.p), nJ = binom(e.n, e.q);
  if (b.end) {
    if (e.summands() != b.rank()) fail(ErrorCode::RankMismatch, "materialize: End form rank");
    for (int c = 0; c < b.components(); ++c)
      coef.push_back(b.summand_left(c) == b.summand_right(c) ? e.coef[b.summand_left(c)] : CMat::Zero(nI, nJ));
  } else {
    if (e.summands() != b.components()) fail(ErrorCode::RankMismatch, "materialize: End form rank");
    coef = e.coef;
  }
  return constant_form(space, e.p, e.q, coef);
}

}  // namespace hodgelab
