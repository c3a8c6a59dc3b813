#include "hodgelab/torus.hpp"

#include "hodgelab/errors.hpp"

namespace hodgelab {

double FiberChart::euclidean_covolume() const {
  return std::abs(tau().imag().determinant());
}

double FiberChart::volume() const {
  return std::pow(2.0, n()) * g.determinant().real() * euclidean_covolume();
}

CVec FiberChart::zeta(const RVec& freq) const {
  const int m = n();
  CVec fx = freq.head(m).cast<cplx>();
  CVec fy = freq.tail(m).cast<cplx>();
  CMat tau_bar_t = tau().conjugate().transpose();
  return delta_inv.transpose() * (2.0 * kPi * kI) * (fy - tau_bar_t * fx);
}

CVec FiberChart::zeta_bar(const RVec& freq) const {
  const int m = n();
  CVec fx = freq.head(m).cast<cplx>();
  return 2.0 * kPi * kI * fx - zeta(freq);
}

CMat unit_volume_metric(const CMat& tau) {
  RMat im = tau.imag();
  return (0.5 * im.inverse()).cast<cplx>();
}

FiberChart build_fiber(const Lattice& lattice, const CMat& metric) {
  const int n = lattice.n;
  if (n != 1 && n != 2) fail(ErrorCode::Unsupported, "fiber dimension must be 1 or 2");
  if (lattice.tau.rows() != n || lattice.tau.cols() != n || metric.rows() != n || metric.cols() != n)
    fail(ErrorCode::ShapeMismatch, "period matrix and metric must be n x n");
  RMat im = lattice.tau.imag();
  Eigen::SelfAdjointEigenSolver<RMat> im_eig(0.5 * (im + im.transpose()));
  if (im_eig.eigenvalues().minCoeff() <= 0.0) fail(ErrorCode::DegenerateFiber, "Im tau is not positive definite");
  if ((metric - metric.adjoint()).norm() > 1e-12 * (1.0 + metric.norm()))
    fail(ErrorCode::NonPositiveMetric, "metric is not hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> g_eig(metric);
  if (g_eig.eigenvalues().minCoeff() <= 0.0) fail(ErrorCode::NonPositiveMetric, "metric is not positive definite");

  FiberChart f;
  f.lattice = lattice;
  f.g = metric;
  // g_inv(b, a) = g^{bbar a}, so that sum_b g_{a bbar} g^{bbar c} = delta_a^c.
  f.g_inv = metric.inverse();
  f.delta = lattice.tau - lattice.tau.conjugate();
  f.delta_inv = f.delta.inverse();
  return f;
}

int ModeSet::index_of(const Eigen::VectorXi& k) const {
  // Lexicographic enumeration is a mixed-radix number with digits k_i + K.
  int idx = 0;
  const int base = 2 * cutoff + 1;
  for (int i = 0; i < k.size(); ++i) {
    if (std::abs(k[i]) > cutoff) return -1;
    idx = idx * base + (k[i] + cutoff);
  }
  return idx;
}

ModeSet mode_set(int n, int cutoff) {
  if (cutoff < 1) fail(ErrorCode::Precondition, "mode cutoff must be at least 1");
  ModeSet ms;
  ms.n = n;
  ms.cutoff = cutoff;
  const int dim = 2 * n;
  const int base = 2 * cutoff + 1;
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= base;
  ms.modes.reserve(total);
  for (int code = 0; code < total; ++code) {
    Eigen::VectorXi k(dim);
    int c = code;
    for (int i = dim - 1; i >= 0; --i) {
      k[i] = c % base - cutoff;
      c /= base;
    }
    if (k.isZero()) ms.zero_index = code;
    ms.modes.push_back(k);
  }
  return ms;
}

ModeSymbols mode_symbols(const FiberChart& fiber, const ModeSet& modes, const RVec& shift) {
  ModeSymbols sym;
  sym.zeta.reserve(modes.size());
  sym.zeta_bar.reserve(modes.size());
  for (const auto& k : modes.modes) {
    RVec f = k.cast<double>() + shift;
    sym.zeta.push_back(fiber.zeta(f));
    sym.zeta_bar.push_back(fiber.zeta_bar(f));
  }
  return sym;
}

RVec character_from_dbar_shift(const FiberChart& fiber, const CVec& c) {
  const int n = fiber.n();
  RMat M(2 * n, 2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    RVec e = RVec::Zero(2 * n);
    e[j] = 1.0;
    CVec zb = fiber.zeta_bar(e);
    M.col(j) << zb.real(), zb.imag();
  }
  RVec rhs(2 * n);
  rhs << c.real(), c.imag();
  return M.fullPivLu().solve(rhs);
}

}  // namespace hodgelab
