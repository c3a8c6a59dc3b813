#include "hodgelab/forms.hpp"

#include <algorithm>
#include <random>

#include <json.hpp>

#include "hodgelab/errors.hpp"

namespace hodgelab {

PQForm::PQForm(SpacePtr space, int p, int q) : space_(std::move(space)), p_(p), q_(q) {
  if (!space_) fail(ErrorCode::Precondition, "form without a field space");
  const int n = space_->n();
  nI_ = binom(n, p);
  nJ_ = binom(n, q);
  comps_ = space_->components();
  npts_ = space_->points();
  data_.assign(static_cast<std::size_t>(nI_) * nJ_ * comps_ * npts_, cplx(0.0));
}

bool PQForm::compatible(const PQForm& o) const {
  return space_ == o.space_ && p_ == o.p_ && q_ == o.q_;
}

void PQForm::require_compatible(const PQForm& o, const char* where) const {
  if (!compatible(o)) fail(ErrorCode::ShapeMismatch, std::string(where) + ": forms differ in space or bidegree");
}

PQForm& PQForm::operator+=(const PQForm& o) {
  require_compatible(o, "add");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

PQForm& PQForm::operator-=(const PQForm& o) {
  require_compatible(o, "subtract");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

PQForm& PQForm::operator*=(cplx a) {
  for (auto& v : data_) v *= a;
  return *this;
}

double PQForm::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

void axpy(PQForm& y, cplx a, const PQForm& x) {
  y.require_compatible(x, "axpy");
  auto& yd = y.data();
  const auto& xd = x.data();
  for (std::size_t k = 0; k < yd.size(); ++k) yd[k] += a * xd[k];
}

EndForm EndForm::zero(int n, int p, int q, int summands) {
  EndForm e;
  e.n = n;
  e.p = p;
  e.q = q;
  e.coef.assign(summands, CMat::Zero(binom(n, p), binom(n, q)));
  return e;
}

double EndForm::max_abs() const {
  double m = 0.0;
  for (const auto& c : coef)
    if (c.size()) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

namespace {

// det[ginv(c_i, a_j)] over sorted index lists.
cplx metric_minor(const CMat& ginv, Mask rows_mask, Mask cols_mask) {
  auto rows = elements(rows_mask);
  auto cols = elements(cols_mask);
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  CMat m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = ginv(rows[i], cols[j]);
  return m.determinant();
}

}  // namespace

CMat pairing_weights(const FiberChart& fiber, int p, int q) {
  const int n = fiber.n();
  const auto& SI = subsets(n, p);
  const auto& SJ = subsets(n, q);
  const int nI = static_cast<int>(SI.size()), nJ = static_cast<int>(SJ.size());
  CMat W(nI * nJ, nI * nJ);
  for (int A = 0; A < nI; ++A)
    for (int B = 0; B < nJ; ++B)
      for (int C = 0; C < nI; ++C)
        for (int D = 0; D < nJ; ++D)
          W(A * nJ + B, C * nJ + D) =
              metric_minor(fiber.g_inv, SI[C], SI[A]) * metric_minor(fiber.g_inv, SJ[B], SJ[D]);
  return W;
}

cplx l2_inner(const PQForm& phi, const PQForm& psi) {
  phi.require_compatible(psi, "l2_inner");
  if (phi.nI() == 0 || phi.nJ() == 0) return 0.0;
  const FieldSpace& sp = phi.sp();
  CMat W = pairing_weights(sp.fiber(), phi.p(), phi.q());
  const int nJ = phi.nJ();
  cplx total = 0.0;
  for (int A = 0; A < phi.nI(); ++A)
    for (int B = 0; B < nJ; ++B)
      for (int C = 0; C < phi.nI(); ++C)
        for (int D = 0; D < nJ; ++D) {
          const cplx w = W(A * nJ + B, C * nJ + D);
          if (w == cplx(0.0)) continue;
          for (int c = 0; c < phi.comps(); ++c) total += w * sp.integrate(phi.field(A, B, c), psi.field(C, D, c));
        }
  return total;
}

double l2_norm(const PQForm& psi) { return std::sqrt(std::max(0.0, l2_inner(psi, psi).real())); }

namespace {

// Sign of the permutation sorting a tuple of distinct indices, or 0 on repeats.
int sort_sign(std::vector<int> t) {
  int sign = 1;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (t[i] == t[j]) return 0;
      if (t[i] > t[j]) sign = -sign;
    }
  return sign;
}

Mask to_mask(const std::vector<int>& t) {
  Mask m = 0;
  for (int v : t) m |= 1u << v;
  return m;
}

void all_tuples(int n, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int v = 0; v < n; ++v) {
    cur.push_back(v);
    all_tuples(n, k, cur, out);
    cur.pop_back();
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

cplx l2_inner_full_sum(const PQForm& phi, const PQForm& psi) {
  phi.require_compatible(psi, "l2_inner_full_sum");
  const int n = phi.n(), p = phi.p(), q = phi.q();
  if (phi.nI() == 0 || phi.nJ() == 0) return 0.0;
  const FieldSpace& sp = phi.sp();
  const CMat& ginv = sp.fiber().g_inv;
  std::vector<std::vector<int>> TA, TB;
  std::vector<int> cur;
  all_tuples(n, p, cur, TA);
  all_tuples(n, q, cur, TB);
  cplx total = 0.0;
  for (const auto& a : TA)
    for (const auto& b : TB) {
      const int sab = sort_sign(a) * sort_sign(b);
      if (!sab) continue;
      const int A = subset_index(n, to_mask(a)), B = subset_index(n, to_mask(b));
      for (const auto& c : TA)
        for (const auto& d : TB) {
          const int scd = sort_sign(c) * sort_sign(d);
          if (!scd) continue;
          const int C = subset_index(n, to_mask(c)), D = subset_index(n, to_mask(d));
          cplx w = 1.0;
          for (int i = 0; i < p; ++i) w *= ginv(c[i], a[i]);
          for (int i = 0; i < q; ++i) w *= ginv(b[i], d[i]);
          w *= static_cast<double>(sab * scd);
          for (int e = 0; e < phi.comps(); ++e) total += w * sp.integrate(phi.field(A, B, e), psi.field(C, D, e));
        }
    }
  return total / (factorial(p) * factorial(q));
}

namespace {

void add_scaled(cplx* dst, const cplx* src, cplx s, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) dst[k] += s * src[k];
}

}  // namespace

PQForm wedge_dz(const PQForm& psi, int a) {
  const int n = psi.n();
  PQForm out(psi.space(), psi.p() + 1, psi.q());
  if (out.nI() == 0) return out;
  const auto& SI = subsets(n, psi.p());
  for (int I = 0; I < psi.nI(); ++I) {
    if (SI[I] & (1u << a)) continue;
    const int T = subset_index(n, SI[I] | (1u << a));
    const double sign = front_sign(SI[I], a);
    for (int J = 0; J < psi.nJ(); ++J)
      for (int c = 0; c < psi.comps(); ++c) add_scaled(out.field(T, J, c), psi.field(I, J, c), sign, psi.npts());
  }
  return out;
}

PQForm wedge_dzbar(const PQForm& psi, int b) {
  const int n = psi.n();
  PQForm out(psi.space(), psi.p(), psi.q() + 1);
  if (out.nJ() == 0) return out;
  const auto& SJ = subsets(n, psi.q());
  const double parity = (psi.p() % 2) ? -1.0 : 1.0;
  for (int J = 0; J < psi.nJ(); ++J) {
    if (SJ[J] & (1u << b)) continue;
    const int T = subset_index(n, SJ[J] | (1u << b));
    const double sign = parity * front_sign(SJ[J], b);
    for (int I = 0; I < psi.nI(); ++I)
      for (int c = 0; c < psi.comps(); ++c) add_scaled(out.field(I, T, c), psi.field(I, J, c), sign, psi.npts());
  }
  return out;
}

PQForm contract_dz(const PQForm& psi, int a) {
  const int n = psi.n();
  PQForm out(psi.space(), psi.p() - 1, psi.q());
  if (out.nI() == 0 || psi.nI() == 0) return out;
  const auto& ST = subsets(n, psi.p() - 1);
  for (int T = 0; T < out.nI(); ++T) {
    if (ST[T] & (1u << a)) continue;
    const int I = subset_index(n, ST[T] | (1u << a));
    const double sign = front_sign(ST[T], a);
    for (int J = 0; J < psi.nJ(); ++J)
      for (int c = 0; c < psi.comps(); ++c) add_scaled(out.field(T, J, c), psi.field(I, J, c), sign, psi.npts());
  }
  return out;
}

PQForm contract_dzbar(const PQForm& psi, int b) {
  const int n = psi.n();
  PQForm out(psi.space(), psi.p(), psi.q() - 1);
  if (out.nJ() == 0 || psi.nJ() == 0) return out;
  const auto& ST = subsets(n, psi.q() - 1);
  for (int T = 0; T < out.nJ(); ++T) {
    if (ST[T] & (1u << b)) continue;
    const int J = subset_index(n, ST[T] | (1u << b));
    const double sign = front_sign(ST[T], b);
    for (int I = 0; I < psi.nI(); ++I)
      for (int c = 0; c < psi.comps(); ++c) add_scaled(out.field(I, T, c), psi.field(I, J, c), sign, psi.npts());
  }
  return out;
}

PQForm iota(const PQForm& psi, int a) { return contract_dz(psi, a); }

PQForm iota_bar(const PQForm& psi, int b) {
  PQForm out = contract_dzbar(psi, b);
  if (psi.p() % 2) out *= -1.0;
  return out;
}

PQForm cup_soft(const TangentValuedForm& A, const PQForm& psi) {
  const int n = psi.n();
  if (A.coef.rows() != n || A.coef.cols() != n) fail(ErrorCode::ShapeMismatch, "cup: tangent form size");
  if (!A.conjugate) {
    PQForm out(psi.space(), psi.p() - 1, psi.q() + 1);
    if (out.nI() == 0 || out.nJ() == 0) return out;
    for (int s = 0; s < n; ++s) {
      PQForm ins = contract_dz(psi, s);
      for (int b = 0; b < n; ++b)
        if (A.coef(s, b) != cplx(0.0)) axpy(out, A.coef(s, b), wedge_dzbar(ins, b));
    }
    return out;
  }
  PQForm out(psi.space(), psi.p() + 1, psi.q() - 1);
  if (out.nI() == 0 || out.nJ() == 0) return out;
  for (int b = 0; b < n; ++b) {
    PQForm ins = contract_dzbar(psi, b);
    for (int a = 0; a < n; ++a)
      if (A.coef(b, a) != cplx(0.0)) axpy(out, A.coef(b, a), wedge_dz(ins, a));
  }
  return out;
}

PQForm cup(const TangentValuedForm& A, const PQForm& psi) {
  if (!A.conjugate && psi.p() <= 0) fail(ErrorCode::DegreeError, "cup needs p >= 1");
  if (A.conjugate && psi.q() <= 0) fail(ErrorCode::DegreeError, "conjugate cup needs q >= 1");
  return cup_soft(A, psi);
}

namespace {

// Per-component scalar coefficient of an End-valued constant acting on a component.
cplx end_component_coef(const EndForm& eta, const BundleData& bundle, int comp, int E, int F, int sign_right) {
  if (!bundle.end) {
    if (eta.summands() != bundle.rank()) fail(ErrorCode::RankMismatch, "End form does not match the bundle rank");
    return eta.coef[comp](E, F);
  }
  if (eta.summands() != bundle.rank()) fail(ErrorCode::RankMismatch, "End form does not match the bundle rank");
  const int i = bundle.summand_left(comp), j = bundle.summand_right(comp);
  return eta.coef[i](E, F) - static_cast<double>(sign_right) * eta.coef[j](E, F);
}

PQForm wedge_basis(const PQForm& psi, Mask E, Mask F) {
  PQForm x = psi;
  auto fs = elements(F);
  auto es = elements(E);
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) x = wedge_dzbar(x, *it);
  for (auto it = es.rbegin(); it != es.rend(); ++it) x = wedge_dz(x, *it);
  return x;
}

}  // namespace

PQForm wedge_end(const EndForm& eta, const PQForm& psi) {
  const int n = psi.n();
  if (eta.n != n) fail(ErrorCode::ShapeMismatch, "wedge_end: dimension");
  PQForm out(psi.space(), psi.p() + eta.p, psi.q() + eta.q);
  if (out.nI() == 0 || out.nJ() == 0) return out;
  const auto& SE = subsets(n, eta.p);
  const auto& SF = subsets(n, eta.q);
  const BundleData& bundle = psi.sp().bundle();
  // For End targets: [eta, psi]_{ij} = eta_i ^ psi_ij - (-1)^{|eta||psi|} psi_ij ^ eta_j = (eta_i - eta_j) ^ psi_ij.
  for (int E = 0; E < static_cast<int>(SE.size()); ++E)
    for (int F = 0; F < static_cast<int>(SF.size()); ++F) {
      PQForm w = wedge_basis(psi, SE[E], SF[F]);
      for (int c = 0; c < out.comps(); ++c) {
        const cplx k = end_component_coef(eta, bundle, c, E, F, 1);
        if (k == cplx(0.0)) continue;
        for (int I = 0; I < out.nI(); ++I)
          for (int J = 0; J < out.nJ(); ++J) add_scaled(out.field(I, J, c), w.field(I, J, c), k, out.npts());
      }
    }
  return out;
}

PQForm act_end(const EndForm& f, const PQForm& psi) {
  if (f.p != 0 || f.q != 0) fail(ErrorCode::DegreeError, "act_end needs an End-valued function");
  return wedge_end(f, psi);
}

PQForm constant_form(const SpacePtr& space, int p, int q, const std::vector<CMat>& coef_per_component) {
  PQForm out(space, p, q);
  if (static_cast<int>(coef_per_component.size()) != out.comps())
    fail(ErrorCode::RankMismatch, "constant_form: component count");
  for (int c = 0; c < out.comps(); ++c)
    for (int I = 0; I < out.nI(); ++I)
      for (int J = 0; J < out.nJ(); ++J) space->fill_constant(coef_per_component[c](I, J), out.field(I, J, c));
  return out;
}

namespace {

cplx gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const double re = nd(rng);
  const double im = nd(rng);
  return cplx(re, im) / std::sqrt(2.0);
}

}  // namespace

PQForm random_form(const SpacePtr& space, int p, int q, std::uint64_t seed, int max_mode) {
  PQForm out(space, p, q);
  std::mt19937_64 rng(seed);
  if (space->backend() == Backend::Fourier) {
    const auto& fs = static_cast<const FourierSpace&>(*space);
    for (int I = 0; I < out.nI(); ++I)
      for (int J = 0; J < out.nJ(); ++J)
        for (int c = 0; c < out.comps(); ++c) {
          cplx* f = out.field(I, J, c);
          for (std::size_t m = 0; m < out.npts(); ++m) {
            cplx z = gaussian(rng);
            if (max_mode > 0 && fs.modes()[m].cwiseAbs().maxCoeff() > max_mode) z = 0.0;
            f[m] = z;
          }
        }
    return out;
  }
  const auto& gs = static_cast<const GridSpace&>(*space);
  const int N = gs.grid().N;
  const int d = gs.degree();
  const int L = max_mode > 0 ? max_mode : 2;
  const cplx tau = gs.fiber().tau()(0, 0);
  // Sections used as carriers: theta sections for d != 0, the constant for d = 0.
  const int carriers = d == 0 ? 1 : std::abs(d);
  std::vector<std::vector<cplx>> carrier(carriers, std::vector<cplx>(gs.points()));
  for (int r = 0; r < carriers; ++r)
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i)
        carrier[r][gs.grid().index(i, j)] = d == 0 ? cplx(1.0) : theta_section(d, r, tau, gs.x(i), gs.y(j)).value;
  for (int I = 0; I < out.nI(); ++I)
    for (int J = 0; J < out.nJ(); ++J)
      for (int c = 0; c < out.comps(); ++c) {
        cplx* f = out.field(I, J, c);
        for (int r = 0; r < carriers; ++r)
          for (int kx = -L; kx <= L; ++kx)
            for (int ky = -L; ky <= L; ++ky) {
              const cplx w = gaussian(rng);
              for (int j = 0; j < N; ++j)
                for (int i = 0; i < N; ++i) {
                  const std::size_t k = gs.grid().index(i, j);
                  f[k] += w * carrier[r][k] * std::exp(2.0 * kPi * kI * (kx * gs.x(i) + ky * gs.y(j)));
                }
            }
      }
  return out;
}

std::string serialize_form(const PQForm& psi) {
  nlohmann::json j;
  j["p"] = psi.p();
  j["q"] = psi.q();
  j["n"] = psi.n();
  j["backend"] = backend_name(psi.sp().backend());
  j["bundle"] = bundle_kind_name(psi.sp().bundle().kind);
  j["components"] = psi.comps();
  j["points"] = psi.npts();
  std::vector<double> re, im;
  re.reserve(psi.data().size());
  im.reserve(psi.data().size());
  for (const auto& v : psi.data()) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

}  // namespace hodgelab
