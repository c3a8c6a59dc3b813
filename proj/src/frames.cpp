#include "hodgelab/frames.hpp"

#include <cmath>

#include "hodgelab/errors.hpp"

namespace hodgelab {

namespace {

bool in_range(int n, int p, int q) { return p >= 0 && q >= 0 && p <= n && q <= n; }

// Slope and ds-curvature of a bundle component of a character family.
struct ComponentData {
  CVec ell;
  double kappa = 0.0;
};

ComponentData component_data(const FamilyDescriptor& f, int comp) {
  const int r = static_cast<int>(f.summands.size());
  if (!f.end) return {f.summands[comp].ell, f.summands[comp].kappa};
  const int i = comp / r, j = comp % r;
  return {f.summands[i].ell - f.summands[j].ell, f.summands[i].kappa - f.summands[j].kappa};
}

int character_components(const FamilyDescriptor& f) {
  const int r = static_cast<int>(f.summands.size());
  return f.end ? r * r : r;
}

bool zero_slope(const CVec& ell) { return ell.cwiseAbs().maxCoeff() < 1e-14; }

cplx minor(const CMat& M, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  CMat sub(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) sub(a, b) = M(rows[a], cols[b]);
  return sub.determinant();
}

// Derivative of a minor of M along dM, by replacing one row at a time.
cplx minor_derivative(const CMat& M, const CMat& dM, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int k = static_cast<int>(rows.size());
  cplx total = 0.0;
  for (int r = 0; r < k; ++r) {
    CMat sub(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) sub(a, b) = (a == r ? dM : M)(rows[a], cols[b]);
    total += sub.determinant();
  }
  return total;
}

std::vector<Representative> untwisted_frame(const FiberState& st, const CMat& tau_prime, int p, int q) {
  std::vector<Representative> out;
  for (const auto& b : form_basis(st.fiber, tau_prime, p, q)) {
    std::vector<CMat> v(1, b.value), ds(1, b.ds), dsb(1, b.dsbar);
    out.push_back({constant_form(st.space, p, q, v), constant_form(st.space, p, q, ds),
                   constant_form(st.space, p, q, dsb), true});
  }
  return out;
}

std::vector<Representative> theta_frame(const FamilyDescriptor& f, const FiberState& st, int p, int q) {
  const int d = f.degree;
  if ((d > 0 && q != 0) || (d < 0 && q != 1)) return {};
  const auto& gs = static_cast<const GridSpace&>(*st.space);
  const int N = gs.grid().N;
  const cplx tau = st.fiber.tau()(0, 0);
  const cplx tau1 = f.tau1.size() ? f.tau1(0, 0) : cplx(0.0);
  const double t = tau.imag();
  const cplx ds_t = tau1 / (2.0 * kI);
  const cplx dsb_t = std::conj(tau1) * kI / 2.0;
  std::vector<Representative> out;
  for (int j = 0; j < std::abs(d); ++j) {
    Representative rep{PQForm(st.space, p, q), PQForm(st.space, p, q), PQForm(st.space, p, q), true};
    cplx* v = rep.value.field(0, 0, 0);
    cplx* ds = rep.ds.field(0, 0, 0);
    cplx* dsb = rep.dsbar.field(0, 0, 0);
    for (int y = 0; y < N; ++y)
      for (int x = 0; x < N; ++x) {
        const std::size_t k = gs.grid().index(x, y);
        const ThetaValue th = theta_section(d, j, tau, gs.x(x), gs.y(y));
        if (d > 0) {
          v[k] = th.value;
          ds[k] = tau1 * th.dtau;
          dsb[k] = 0.0;
        } else {
          // t^{-1/2} conj(F) dz^p ^ dzbar; conj(F) depends on conj(tau) only.
          const double w = 1.0 / std::sqrt(t);
          const double dw = -0.5 * std::pow(t, -1.5);
          v[k] = w * th.value;
          ds[k] = dw * ds_t * th.value;
          dsb[k] = dw * dsb_t * th.value + w * std::conj(tau1) * th.dtau;
        }
      }
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<Representative> character_frame(const FamilyDescriptor& f, const FiberState& st, cplx s, int p, int q) {
  const int n = f.n;
  const int nI = binom(n, p), nJ = binom(n, q);
  const int comps = character_components(f);
  std::vector<Representative> out;
  for (int c = 0; c < comps; ++c) {
    const ComponentData cd = component_data(f, c);
    if (!zero_slope(cd.ell)) continue;
    // e^{-kappa |s|^2 / 2} is the holomorphic frame coefficient in the unitary frame of the family.
    const double amp = std::exp(-0.5 * cd.kappa * std::norm(s));
    for (int I = 0; I < nI; ++I)
      for (int J = 0; J < nJ; ++J) {
        std::vector<CMat> v(comps, CMat::Zero(nI, nJ));
        v[c](I, J) = amp;
        Representative rep;
        rep.value = constant_form(st.space, p, q, v);
        rep.ds = -cd.kappa * std::conj(s) * rep.value;
        rep.dsbar = PQForm(st.space, p, q);
        out.push_back(std::move(rep));
      }
  }
  return out;
}

}  // namespace

std::vector<ScalarFrame> form_basis(const FiberChart& fiber, const CMat& tau_prime, int p, int q) {
  const int n = fiber.n();
  const CMat& Xinv = fiber.delta_inv;
  // theta^j = sum_b Mbar(j, b) dzbar^b is the s-independent dual of dy.
  const CMat Mbar = -Xinv;
  const CMat dMs = Xinv * tau_prime * Xinv;
  const CMat dMsb = -Xinv * tau_prime.conjugate() * Xinv;
  const auto& SI = subsets(n, p);
  const auto& SJ = subsets(n, q);
  const int nI = static_cast<int>(SI.size()), nJ = static_cast<int>(SJ.size());
  std::vector<ScalarFrame> out;
  for (int I = 0; I < nI; ++I)
    for (int J = 0; J < nJ; ++J) {
      ScalarFrame f{CMat::Zero(nI, nJ), CMat::Zero(nI, nJ), CMat::Zero(nI, nJ)};
      const auto rows = elements(SJ[J]);
      for (int B = 0; B < nJ; ++B) {
        const auto cols = elements(SJ[B]);
        f.value(I, B) = minor(Mbar, rows, cols);
        f.ds(I, B) = minor_derivative(Mbar, dMs, rows, cols);
        f.dsbar(I, B) = minor_derivative(Mbar, dMsb, rows, cols);
      }
      out.push_back(std::move(f));
    }
  return out;
}

int expected_rank(const FamilyDescriptor& f, int p, int q) {
  const int n = f.n;
  if (!in_range(n, p, q)) return 0;
  switch (f.kind) {
    case FamilyKind::ComplexStructure:
      return binom(n, p) * binom(n, q);
    case FamilyKind::Theta:
      if (f.degree > 0) return q == 0 ? f.degree : 0;
      return q == 1 ? -f.degree : 0;
    case FamilyKind::Character: {
      int zero = 0;
      for (int c = 0; c < character_components(f); ++c)
        if (zero_slope(component_data(f, c).ell)) ++zero;
      return zero * binom(n, p) * binom(n, q);
    }
  }
  return 0;
}

std::vector<Representative> analytic_frame(const FamilyDescriptor& f, const FiberState& st, cplx s, int p, int q) {
  if (!in_range(f.n, p, q)) fail(ErrorCode::DegreeError, "bidegree out of range");
  switch (f.kind) {
    case FamilyKind::ComplexStructure: {
      const CMat tp = f.tau1.size() ? f.tau1 : CMat::Zero(f.n, f.n);
      return untwisted_frame(st, tp, p, q);
    }
    case FamilyKind::Theta:
      return theta_frame(f, st, p, q);
    case FamilyKind::Character:
      return character_frame(f, st, s, p, q);
  }
  return {};
}

CMat gram_matrix(const std::vector<PQForm>& forms) {
  const int r = static_cast<int>(forms.size());
  CMat H(r, r);
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l) H(k, l) = l2_inner(forms[k], forms[l]);
  return H;
}

HarmonicFrame harmonic_frame(const HorizontalData& hd, int p, int q, const SolverOptions& opt) {
  HarmonicFrame fr;
  fr.p = p;
  fr.q = q;
  fr.space = hd.space();
  fr.members = analytic_frame(hd.family, hd.state, hd.s, p, q);
  if (fr.members.empty())
    fail(ErrorCode::RankZero, "direct image has rank zero in bidegree (" + std::to_string(p) + "," + std::to_string(q) + ")");
  const auto basis = harmonic_basis(fr.space, p, q, opt);
  if (basis.size() != fr.members.size())
    fail(ErrorCode::Precondition, "harmonic space has dimension " + std::to_string(basis.size()) + ", frame has " +
                                      std::to_string(fr.members.size()) + ": direct image is not locally free here");
  const bool grid = fr.space->backend() == Backend::Grid;
  std::vector<PQForm> values;
  for (auto& m : fr.members) {
    PQForm h = harmonic_projection(m.value, Which::Dbar, opt);
    const double norm = l2_norm(m.value);
    const double res = l2_norm(m.value - h) / norm;
    fr.projection_residual = std::max(fr.projection_residual, res);
    if (res > (grid ? 1e-3 : 1e-8)) fail(ErrorCode::ProjectionResidual, "frame member is not harmonic: residual " + std::to_string(res));
    if (grid) {
      const double box = l2_norm(laplacian(h)) / l2_norm(h);
      if (box > 1e-6) fail(ErrorCode::ProjectionResidual, "projected frame member has box norm " + std::to_string(box));
    }
    m.value = h;
    values.push_back(h);
  }
  fr.gram = gram_matrix(values);
  return fr;
}

}  // namespace hodgelab
