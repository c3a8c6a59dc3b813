#include "hodgelab/dolbeault.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hodgelab/errors.hpp"
#include "hodgelab/krylov.hpp"

namespace hodgelab {

namespace {

bool in_range(int n, int p, int q) { return p >= 0 && q >= 0 && p <= n && q <= n; }

void require_range(const PQForm& psi, const char* op) {
  if (!in_range(psi.n(), psi.p(), psi.q()))
    fail(ErrorCode::DegreeError, std::string(op) + ": bidegree outside [0, n]");
}

PQForm covariant(const PQForm& psi, int index, bool holomorphic) {
  PQForm out(psi.space(), psi.p(), psi.q());
  const FieldSpace& sp = psi.sp();
  for (int I = 0; I < psi.nI(); ++I)
    for (int J = 0; J < psi.nJ(); ++J)
      for (int c = 0; c < psi.comps(); ++c) {
        if (holomorphic)
          sp.holo(index, c, psi.field(I, J, c), out.field(I, J, c));
        else
          sp.antiholo(index, c, psi.field(I, J, c), out.field(I, J, c));
      }
  return out;
}

}  // namespace

PQForm dbar(const PQForm& psi, bool strict) {
  if (strict) {
    require_range(psi, "dbar");
    if (psi.q() >= psi.n()) fail(ErrorCode::DegreeError, "dbar needs q < n");
  }
  PQForm out(psi.space(), psi.p(), psi.q() + 1);
  if (out.nI() == 0 || out.nJ() == 0 || psi.nI() == 0 || psi.nJ() == 0) return out;
  for (int b = 0; b < psi.n(); ++b) out += wedge_dzbar(covariant(psi, b, false), b);
  return out;
}

PQForm del_h(const PQForm& psi, bool strict) {
  if (strict) {
    require_range(psi, "del_h");
    if (psi.p() >= psi.n()) fail(ErrorCode::DegreeError, "del_h needs p < n");
  }
  PQForm out(psi.space(), psi.p() + 1, psi.q());
  if (out.nI() == 0 || out.nJ() == 0 || psi.nI() == 0 || psi.nJ() == 0) return out;
  for (int a = 0; a < psi.n(); ++a) out += wedge_dz(covariant(psi, a, true), a);
  return out;
}

PQForm dbar_star(const PQForm& psi, bool strict) {
  if (strict) {
    require_range(psi, "dbar_star");
    if (psi.q() < 1) fail(ErrorCode::DegreeError, "dbar_star needs q >= 1");
  }
  PQForm out(psi.space(), psi.p(), psi.q() - 1);
  if (out.nI() == 0 || out.nJ() == 0 || psi.nI() == 0 || psi.nJ() == 0) return out;
  const CMat& ginv = psi.sp().fiber().g_inv;
  for (int b = 0; b < psi.n(); ++b) {
    PQForm ins = iota_bar(psi, b);
    for (int a = 0; a < psi.n(); ++a)
      if (ginv(b, a) != cplx(0.0)) axpy(out, -ginv(b, a), covariant(ins, a, true));
  }
  return out;
}

PQForm del_star(const PQForm& psi, bool strict) {
  if (strict) {
    require_range(psi, "del_star");
    if (psi.p() < 1) fail(ErrorCode::DegreeError, "del_star needs p >= 1");
  }
  PQForm out(psi.space(), psi.p() - 1, psi.q());
  if (out.nI() == 0 || out.nJ() == 0 || psi.nI() == 0 || psi.nJ() == 0) return out;
  const CMat& ginv = psi.sp().fiber().g_inv;
  for (int a = 0; a < psi.n(); ++a) {
    PQForm ins = iota(psi, a);
    for (int b = 0; b < psi.n(); ++b)
      if (ginv(b, a) != cplx(0.0)) axpy(out, -ginv(b, a), covariant(ins, b, false));
  }
  return out;
}

PQForm lefschetz(const PQForm& psi, bool strict) {
  if (strict) require_range(psi, "lefschetz");
  PQForm out(psi.space(), psi.p() + 1, psi.q() + 1);
  if (out.nI() == 0 || out.nJ() == 0) return out;
  const CMat& g = psi.sp().fiber().g;
  for (int a = 0; a < psi.n(); ++a)
    for (int b = 0; b < psi.n(); ++b)
      if (g(a, b) != cplx(0.0)) axpy(out, kI * g(a, b), wedge_dz(wedge_dzbar(psi, b), a));
  return out;
}

PQForm lambda(const PQForm& psi, bool strict) {
  if (strict) require_range(psi, "lambda");
  PQForm out(psi.space(), psi.p() - 1, psi.q() - 1);
  if (out.nI() == 0 || out.nJ() == 0) return out;
  const CMat& ginv = psi.sp().fiber().g_inv;
  for (int a = 0; a < psi.n(); ++a) {
    PQForm ia = iota(psi, a);
    for (int b = 0; b < psi.n(); ++b)
      if (ginv(b, a) != cplx(0.0)) axpy(out, -kI * ginv(b, a), iota_bar(ia, b));
  }
  return out;
}

PQForm laplacian(const PQForm& psi, Which which) {
  if (which == Which::Dbar) return dbar(dbar_star(psi, false), false) + dbar_star(dbar(psi, false), false);
  return del_h(del_star(psi, false), false) + del_star(del_h(psi, false), false);
}

namespace {

// Coefficient of psi at an ordered tuple (a-tuple, b-tuple) expressed through stored entries.
struct TupleRef {
  int I = -1, J = -1;
  double sign = 0.0;
};

TupleRef tuple_ref(int n, const std::vector<int>& a, const std::vector<int>& b) {
  TupleRef r;
  auto perm_sign = [](std::vector<int> t, Mask& m) -> int {
    m = 0;
    int sign = 1;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (m & (1u << t[i])) return 0;
      m |= 1u << t[i];
      for (std::size_t j = i + 1; j < t.size(); ++j)
        if (t[i] > t[j]) sign = -sign;
    }
    return sign;
  };
  Mask ma, mb;
  const int sa = perm_sign(a, ma);
  const int sb = perm_sign(b, mb);
  if (!sa || !sb) return r;
  r.I = subset_index(n, ma);
  r.J = subset_index(n, mb);
  r.sign = sa * sb;
  return r;
}

}  // namespace

PQForm curvature_commutator(const PQForm& psi) {
  const int n = psi.n();
  require_range(psi, "curvature_commutator");
  PQForm out(psi.space(), psi.p(), psi.q());
  const FieldSpace& sp = psi.sp();
  const CMat& ginv = sp.fiber().g_inv;
  const auto& SI = subsets(n, psi.p());
  const auto& SJ = subsets(n, psi.q());
  const std::size_t P = psi.npts();
  for (int c = 0; c < psi.comps(); ++c) {
    const CMat& Th = sp.curvature(c);
    if (Th.norm() == 0.0) continue;
    for (int I = 0; I < psi.nI(); ++I)
      for (int J = 0; J < psi.nJ(); ++J) {
        const auto A = elements(SI[I]);
        const auto B = elements(SJ[J]);
        cplx* o = out.field(I, J, c);
        for (int al = 0; al < n; ++al)
          for (int be = 0; be < n; ++be) {
            const cplx gw = -ginv(be, al);
            if (gw == cplx(0.0)) continue;
            // Theta_{alpha betabar} psi_{A, B}
            {
              const cplx k = gw * Th(al, be);
              const cplx* f = psi.field(I, J, c);
              for (std::size_t t = 0; t < P; ++t) o[t] += k * f[t];
            }
            // - sum_mu Theta_{alpha_mu betabar} psi_{alpha_1 .. alpha (at mu) .. alpha_p, B}
            for (std::size_t mu = 0; mu < A.size(); ++mu) {
              auto a2 = A;
              a2[mu] = al;
              TupleRef r = tuple_ref(n, a2, B);
              if (r.sign == 0.0) continue;
              const cplx k = -gw * Th(A[mu], be) * r.sign;
              const cplx* f = psi.field(r.I, r.J, c);
              for (std::size_t t = 0; t < P; ++t) o[t] += k * f[t];
            }
            // - sum_nu Theta_{alpha betabar_nu} psi_{A, beta_1 .. beta (at nu) .. beta_q}
            for (std::size_t nu = 0; nu < B.size(); ++nu) {
              auto b2 = B;
              b2[nu] = be;
              TupleRef r = tuple_ref(n, A, b2);
              if (r.sign == 0.0) continue;
              const cplx k = -gw * Th(al, B[nu]) * r.sign;
              const cplx* f = psi.field(r.I, r.J, c);
              for (std::size_t t = 0; t < P; ++t) o[t] += k * f[t];
            }
          }
      }
  }
  return out;
}

double bkn_defect(const PQForm& psi) {
  const double nrm = l2_norm(psi);
  if (nrm == 0.0) return 0.0;
  PQForm r = laplacian(psi, Which::Dbar) - laplacian(psi, Which::Del) - curvature_commutator(psi);
  return l2_norm(r) / nrm;
}

double bkn_scalar_defect(const PQForm& psi, double c) {
  const double nrm = l2_norm(psi);
  if (nrm == 0.0) return 0.0;
  PQForm r = laplacian(psi, Which::Dbar) - laplacian(psi, Which::Del);
  axpy(r, -c, psi);
  return l2_norm(r) / nrm;
}

// ---------------------------------------------------------------------------
// Fourier backend: spectral blocks per (mode, component)

namespace {

struct SpectralBlocks {
  int dim = 0;
  int comps = 0;
  // f(box) on block = right * diag(f(evals)) * left
  std::vector<CMat> right, left;
  std::vector<RVec> evals;
};

std::shared_ptr<const SpectralBlocks> spectral_blocks(const FourierSpace& fs, int p, int q, Which which) {
  const std::string key = "spectral:" + std::to_string(p) + ":" + std::to_string(q) + ":" +
                          (which == Which::Dbar ? "dbar" : "del");
  return fs.memo<SpectralBlocks>(key, [&]() {
    auto blocks = std::make_shared<SpectralBlocks>();
    const int n = fs.n();
    const int nI = binom(n, p), nJ = binom(n, q);
    const int dim = nI * nJ;
    blocks->dim = dim;
    blocks->comps = fs.components();
    if (dim == 0) return std::shared_ptr<const SpectralBlocks>(blocks);
    CMat G = pairing_weights(fs.fiber(), p, q).transpose();
    Eigen::LLT<CMat> llt(G);
    CMat L = llt.matrixL();
    CMat Lh = L.adjoint();
    CMat Lh_inv = Lh.inverse();
    const std::size_t M = fs.points();
    blocks->right.resize(M * blocks->comps);
    blocks->left.resize(M * blocks->comps);
    blocks->evals.resize(M * blocks->comps);
    for (std::size_t m = 0; m < M; ++m) {
      auto sub = std::make_shared<FourierSpace>(fs, std::vector<int>{static_cast<int>(m)});
      for (int c = 0; c < blocks->comps; ++c) {
        CMat B(dim, dim);
        for (int e = 0; e < dim; ++e) {
          PQForm basis(sub, p, q);
          basis.field(e / nJ, e % nJ, c)[0] = 1.0;
          PQForm img = laplacian(basis, which);
          for (int f = 0; f < dim; ++f) B(f, e) = img.field(f / nJ, f % nJ, c)[0];
        }
        CMat Bt = Lh * B * Lh_inv;
        Bt = 0.5 * (Bt + Bt.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<CMat> es(Bt);
        const std::size_t k = m * blocks->comps + c;
        blocks->evals[k] = es.eigenvalues();
        blocks->right[k] = Lh_inv * es.eigenvectors();
        blocks->left[k] = es.eigenvectors().adjoint() * Lh;
      }
    }
    return std::shared_ptr<const SpectralBlocks>(blocks);
  });
}

template <class F>
PQForm apply_spectral(const PQForm& psi, Which which, F f) {
  const auto& fs = static_cast<const FourierSpace&>(psi.sp());
  auto blocks = spectral_blocks(fs, psi.p(), psi.q(), which);
  PQForm out(psi.space(), psi.p(), psi.q());
  const int dim = blocks->dim;
  if (dim == 0) return out;
  const int nJ = psi.nJ();
  CVec x(dim), y(dim);
  for (std::size_t m = 0; m < psi.npts(); ++m)
    for (int c = 0; c < psi.comps(); ++c) {
      const std::size_t k = m * blocks->comps + c;
      for (int e = 0; e < dim; ++e) x[e] = psi.field(e / nJ, e % nJ, c)[m];
      CVec z = blocks->left[k] * x;
      for (int e = 0; e < dim; ++e) z[e] *= f(blocks->evals[k][e]);
      y = blocks->right[k] * z;
      for (int e = 0; e < dim; ++e) out.field(e / nJ, e % nJ, c)[m] = y[e];
    }
  return out;
}

bool is_fourier(const PQForm& psi) { return psi.sp().backend() == Backend::Fourier; }

// ---------------------------------------------------------------------------
// Grid backend: matrix-free Krylov solves

int iteration_cap(std::size_t dof) { return static_cast<int>(10.0 * std::sqrt(static_cast<double>(dof))) + 1; }

PQForm from_vec(const PQForm& shape, const Vec& v) {
  PQForm out(shape.space(), shape.p(), shape.q());
  out.data() = v;
  return out;
}

InnerProduct form_dot(const PQForm& shape) {
  return [shape](const Vec& a, const Vec& b) { return l2_inner(from_vec(shape, a), from_vec(shape, b)); };
}

void check_solver(const KrylovResult& r, const char* what) {
  if (!r.converged)
    fail(ErrorCode::SolverDivergence, std::string(what) + ": relative residual " +
                                          std::to_string(r.relative_residual) + " after " +
                                          std::to_string(r.iterations) + " iterations");
}

int grid_harmonic_dimension(const GridSpace& gs, int p, int q) {
  if (!in_range(1, p, q)) return 0;
  const int d = gs.degree();
  if (d > 0) return q == 0 ? d : 0;
  if (d < 0) return q == 1 ? -d : 0;
  const RVec chi = gs.bundle().component_shift(0, 1);
  const bool integral = std::abs(chi[0] - std::round(chi[0])) < 1e-14 && std::abs(chi[1] - std::round(chi[1])) < 1e-14;
  return integral ? 1 : 0;
}

PQForm project_out(const PQForm& psi, const std::vector<PQForm>& basis) {
  PQForm r = psi;
  for (const auto& u : basis) axpy(r, -l2_inner(psi, u), u);
  return r;
}

void orthonormalize(std::vector<PQForm>& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) axpy(vs[i], -l2_inner(vs[i], vs[j]), vs[j]);
    const double nrm = l2_norm(vs[i]);
    if (nrm == 0.0) fail(ErrorCode::ProjectionResidual, "degenerate harmonic basis");
    vs[i] *= 1.0 / nrm;
  }
}

PQForm grid_solve(const PQForm& rhs, double sigma, const std::vector<PQForm>& deflate, const SolverOptions& opt,
                  bool definite) {
  auto shape = rhs;
  LinearOp op = [&](const Vec& in, Vec& out) {
    PQForm x = from_vec(shape, in);
    if (!deflate.empty()) x = project_out(x, deflate);
    PQForm y = laplacian(x, Which::Dbar);
    if (sigma != 0.0) axpy(y, sigma, x);
    if (!deflate.empty()) y = project_out(y, deflate);
    out = y.data();
  };
  Vec x;
  PQForm b = deflate.empty() ? rhs : project_out(rhs, deflate);
  const int cap = iteration_cap(rhs.data().size());
  KrylovResult r = definite ? conjugate_gradient(op, form_dot(shape), b.data(), x, opt.tolerance, cap)
                            : minres(op, form_dot(shape), b.data(), x, opt.tolerance, cap);
  check_solver(r, "grid solve");
  PQForm out = from_vec(shape, x);
  return deflate.empty() ? out : project_out(out, deflate);
}

std::vector<PQForm> grid_harmonic_basis(const SpacePtr& space, int p, int q, const SolverOptions& opt) {
  const auto& gs = static_cast<const GridSpace&>(*space);
  const int dim = grid_harmonic_dimension(gs, p, q);
  std::vector<PQForm> basis;
  if (dim == 0) return basis;
  const int d = gs.degree();
  const int N = gs.grid().N;
  const cplx tau = gs.fiber().tau()(0, 0);
  for (int r = 0; r < dim; ++r) {
    PQForm u(space, p, q);
    cplx* f = u.field(0, 0, 0);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i)
        f[gs.grid().index(i, j)] = d == 0 ? cplx(1.0) : theta_section(d, r, tau, gs.x(i), gs.y(j)).value;
    basis.push_back(u);
  }
  orthonormalize(basis);
  // Shifted inverse iteration towards the lowest eigenvectors of the discrete Laplacian.
  for (int it = 0; it < 80; ++it) {
    std::vector<PQForm> next;
    for (const auto& u : basis) next.push_back(grid_solve(u, 1.0, {}, opt, true));
    orthonormalize(next);
    double change = 0.0;
    for (const auto& u : basis) change = std::max(change, l2_norm(project_out(u, next)));
    basis = next;
    if (change < 1e-11) break;
  }
  for (const auto& u : basis) {
    const double res = l2_norm(laplacian(u, Which::Dbar));
    if (res > 1e-3) fail(ErrorCode::ProjectionResidual, "grid harmonic residual " + std::to_string(res));
  }
  return basis;
}

std::shared_ptr<const std::vector<PQForm>> cached_grid_basis(const SpacePtr& space, int p, int q,
                                                             const SolverOptions& opt) {
  const std::string key = "harmonic:" + std::to_string(p) + ":" + std::to_string(q);
  return space->memo<std::vector<PQForm>>(
      key, [&]() { return std::make_shared<const std::vector<PQForm>>(grid_harmonic_basis(space, p, q, opt)); });
}

// Central stencils give the discrete dbar index zero, so for d != 0 the Laplacian on the
// other q has |d| spurious zero modes (stencil doublers). They are computed as the orthogonal
// complement of the range: r - dbar G dbar* r for d > 0, r - dbar* G dbar r for d < 0.
std::vector<PQForm> grid_spurious_kernel(const SpacePtr& space, int p, int q, const SolverOptions& opt) {
  const auto& gs = static_cast<const GridSpace&>(*space);
  const int d = gs.degree();
  std::vector<PQForm> basis;
  if (!((d > 0 && q == 1) || (d < 0 && q == 0))) return basis;
  std::mt19937_64 rng(0x5eedULL + 17 * p + q);
  std::normal_distribution<double> normal;
  for (int r = 0; r < std::abs(d); ++r) {
    PQForm seed(space, p, q);
    for (auto& z : seed.data()) z = cplx(normal(rng), normal(rng));
    for (const auto& u : basis) axpy(seed, -l2_inner(seed, u), u);
    for (int pass = 0; pass < 6; ++pass) {
      seed *= 1.0 / l2_norm(seed);
      if (l2_norm(laplacian(seed, Which::Dbar)) < 1e-9) break;
      seed = d > 0 ? seed - dbar(green(dbar_star(seed), Which::Dbar, opt))
                   : seed - dbar_star(green(dbar(seed), Which::Dbar, opt));
    }
    basis.push_back(seed);
    orthonormalize(basis);
  }
  for (const auto& u : basis) {
    const double res = l2_norm(laplacian(u, Which::Dbar));
    if (res > 1e-7) fail(ErrorCode::ProjectionResidual, "spurious grid kernel residual " + std::to_string(res));
  }
  return basis;
}

std::shared_ptr<const std::vector<PQForm>> cached_grid_deflation(const SpacePtr& space, int p, int q,
                                                                 const SolverOptions& opt) {
  const std::string key = "deflation:" + std::to_string(p) + ":" + std::to_string(q);
  return space->memo<std::vector<PQForm>>(key, [&]() {
    auto all = *cached_grid_basis(space, p, q, opt);
    for (auto& u : grid_spurious_kernel(space, p, q, opt)) all.push_back(std::move(u));
    return std::make_shared<const std::vector<PQForm>>(std::move(all));
  });
}

void require_grid_dbar(Which which) {
  if (which != Which::Dbar) fail(ErrorCode::Unsupported, "grid backend solves only the dbar-Laplacian");
}

}  // namespace

std::vector<PQForm> harmonic_basis(const SpacePtr& space, int p, int q, const SolverOptions& opt) {
  if (space->backend() == Backend::Grid) return *cached_grid_basis(space, p, q, opt);
  const auto& fs = static_cast<const FourierSpace&>(*space);
  auto blocks = spectral_blocks(fs, p, q, Which::Dbar);
  std::vector<PQForm> basis;
  const int dim = blocks->dim;
  const int nJ = binom(space->n(), q);
  for (std::size_t m = 0; m < fs.points(); ++m)
    for (int c = 0; c < blocks->comps; ++c) {
      const std::size_t k = m * blocks->comps + c;
      for (int e = 0; e < dim; ++e) {
        if (blocks->evals[k][e] > opt.harmonic_threshold) continue;
        PQForm u(space, p, q);
        for (int f = 0; f < dim; ++f) u.field(f / nJ, f % nJ, c)[m] = blocks->right[k](f, e);
        basis.push_back(u);
      }
    }
  orthonormalize(basis);
  return basis;
}

double min_eigenvalue(const SpacePtr& space, int p, int q, Which which) {
  if (space->backend() != Backend::Fourier) fail(ErrorCode::Unsupported, "min_eigenvalue needs the Fourier backend");
  auto blocks = spectral_blocks(static_cast<const FourierSpace&>(*space), p, q, which);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& ev : blocks->evals)
    if (ev.size()) m = std::min(m, ev.minCoeff());
  return m;
}

PQForm harmonic_projection(const PQForm& psi, Which which, const SolverOptions& opt) {
  if (is_fourier(psi))
    return apply_spectral(psi, which, [&](double l) { return l <= opt.harmonic_threshold ? 1.0 : 0.0; });
  require_grid_dbar(which);
  PQForm out(psi.space(), psi.p(), psi.q());
  for (const auto& u : *cached_grid_basis(psi.space(), psi.p(), psi.q(), opt)) axpy(out, l2_inner(psi, u), u);
  return out;
}

PQForm green(const PQForm& psi, Which which, const SolverOptions& opt) {
  if (is_fourier(psi))
    return apply_spectral(psi, which, [&](double l) { return l <= opt.harmonic_threshold ? 0.0 : 1.0 / l; });
  require_grid_dbar(which);
  const auto& basis = *cached_grid_deflation(psi.space(), psi.p(), psi.q(), opt);
  return grid_solve(psi, 0.0, basis, opt, true);
}

PQForm shifted_inverse(const PQForm& psi, double sigma, Which which, const SolverOptions& opt) {
  if (sigma == 0.0) fail(ErrorCode::SingularShift, "zero shift: use green()");
  if (is_fourier(psi)) {
    return apply_spectral(psi, which, [&](double l) {
      if (l <= opt.harmonic_threshold) return 1.0 / sigma;
      if (std::abs(l + sigma) < opt.singular_gap)
        fail(ErrorCode::SingularShift, "shift " + std::to_string(sigma) + " hits eigenvalue " + std::to_string(l));
      return 1.0 / (l + sigma);
    });
  }
  require_grid_dbar(which);
  if (sigma > 0.0) return grid_solve(psi, sigma, {}, opt, true);
  const auto& basis = *cached_grid_basis(psi.space(), psi.p(), psi.q(), opt);
  PQForm out = grid_solve(psi, sigma, basis, opt, false);
  for (const auto& u : basis) axpy(out, l2_inner(psi, u) / sigma, u);
  return out;
}

}  // namespace hodgelab
