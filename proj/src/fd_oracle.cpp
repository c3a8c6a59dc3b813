#include "hodgelab/fd_oracle.hpp"

#include <cmath>

#include "hodgelab/errors.hpp"

namespace hodgelab {

namespace {

void check_gram(const CMat& H) {
  if (H.rows() == 0) fail(ErrorCode::RankZero, "empty frame");
  const Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()));
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0 || hi / lo > 1e8) fail(ErrorCode::IllConditionedGram, "stencil Gram is not well conditioned");
}

}  // namespace

GramStencil gram_stencil(const std::function<CMat(cplx)>& gram, cplx s0, double h) {
  GramStencil st;
  st.s0 = s0;
  st.h = h;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      st.H[a + 1][b + 1] = gram(s0 + cplx(a * h, b * h));
      check_gram(st.H[a + 1][b + 1]);
    }
  return st;
}

GramStencil gram_stencil(const FamilyDescriptor& f, cplx s0, double h, int p, int q) {
  auto gram = [&](cplx s) {
    const CMat tau = tau_at(f, s);
    if (Eigen::SelfAdjointEigenSolver<CMat>(0.5 * (tau - tau.adjoint()) / cplx(0, 1)).eigenvalues().minCoeff() <= 0.0)
      fail(ErrorCode::DegenerateFiber, "Im tau is not positive on the stencil");
    const FiberState st = fiber_state(f, s);
    std::vector<PQForm> values;
    for (const auto& m : analytic_frame(f, st, s, p, q)) values.push_back(m.value);
    if (values.empty()) fail(ErrorCode::RankZero, "no frame for this bidegree");
    return gram_matrix(values);
  };
  GramStencil st = gram_stencil(gram, s0, h);
  st.p = p;
  st.q = q;
  return st;
}

CMat chern_curvature_fd(const GramStencil& st) {
  const double h = st.h;
  const CMat dx = (st.at(1, 0) - st.at(-1, 0)) / (2 * h);
  const CMat dy = (st.at(0, 1) - st.at(0, -1)) / (2 * h);
  const cplx I(0, 1);
  const CMat ds = 0.5 * (dx - I * dy);
  const CMat dsb = 0.5 * (dx + I * dy);
  // d dbar = Laplacian / 4, nine-point stencil
  const CMat edge = st.at(1, 0) + st.at(-1, 0) + st.at(0, 1) + st.at(0, -1);
  const CMat corner = st.at(1, 1) + st.at(1, -1) + st.at(-1, 1) + st.at(-1, -1);
  const CMat lap = (4.0 * edge + corner - 20.0 * st.center()) / (6.0 * h * h);
  return -0.25 * lap + ds * st.center().inverse() * dsb;
}

Extrapolated richardson(const CMat& coarse, const CMat& fine) {
  if (coarse.rows() != fine.rows() || coarse.cols() != fine.cols())
    fail(ErrorCode::ShapeMismatch, "richardson: tensors differ in shape");
  return {(4.0 * fine - coarse) / 3.0, (fine - coarse).cwiseAbs().maxCoeff() / 3.0};
}

Extrapolated richardson(const GramStencil& coarse, const GramStencil& fine) {
  if (coarse.s0 != fine.s0) fail(ErrorCode::Precondition, "richardson: stencils have different centers");
  if (std::abs(fine.h - 0.5 * coarse.h) > 1e-12 * coarse.h)
    fail(ErrorCode::Precondition, "richardson: fine step must be half the coarse step");
  return richardson(chern_curvature_fd(coarse), chern_curvature_fd(fine));
}

double FdResult::normalized() const {
  if (value.rows() != 1) fail(ErrorCode::Precondition, "normalized curvature needs a rank-1 frame");
  return value(0, 0).real() / gram(0, 0).real();
}

namespace {

FdResult assemble(const GramStencil& coarse, const GramStencil& fine) {
  FdResult r;
  const Extrapolated e = richardson(coarse, fine);
  r.value = e.value;
  r.error = e.error;
  r.coarse = chern_curvature_fd(coarse);
  r.fine = chern_curvature_fd(fine);
  r.gram = fine.center();
  return r;
}

}  // namespace

FdResult curvature_fd(const FamilyDescriptor& f, cplx s0, int p, int q, double h) {
  return assemble(gram_stencil(f, s0, h, p, q), gram_stencil(f, s0, 0.5 * h, p, q));
}

FdResult curvature_fd(const std::function<CMat(cplx)>& gram, cplx s0, double h) {
  return assemble(gram_stencil(gram, s0, h), gram_stencil(gram, s0, 0.5 * h));
}

}  // namespace hodgelab
