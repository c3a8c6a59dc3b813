#include "hodgelab/krylov.hpp"

#include <cmath>
#include <limits>

namespace hodgelab {

namespace {

void axpy(Vec& y, cplx a, const Vec& x) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

}  // namespace

KrylovResult conjugate_gradient(const LinearOp& A, const InnerProduct& dot, const Vec& b, Vec& x, double tol,
                                int max_iter) {
  KrylovResult res;
  x.assign(b.size(), cplx(0.0));
  const double bnorm = std::sqrt(std::abs(dot(b, b)));
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  Vec r = b, p = b, Ap(b.size());
  double rs = dot(r, r).real();
  for (int it = 1; it <= max_iter; ++it) {
    A(p, Ap);
    const cplx pAp = dot(p, Ap);
    if (pAp.real() <= 0.0) break;
    const cplx alpha = rs / pAp.real();
    axpy(x, alpha, p);
    axpy(r, -alpha, Ap);
    const double rs_new = dot(r, r).real();
    res.iterations = it;
    res.relative_residual = std::sqrt(rs_new) / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    const double beta = rs_new / rs;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
    rs = rs_new;
  }
  return res;
}

KrylovResult minres(const LinearOp& A, const InnerProduct& dot, const Vec& b, Vec& x, double tol, int max_iter) {
  KrylovResult res;
  const std::size_t n = b.size();
  x.assign(n, cplx(0.0));
  const double beta1 = std::sqrt(std::abs(dot(b, b)));
  if (beta1 == 0.0) {
    res.converged = true;
    return res;
  }
  Vec r1 = b, r2 = b, y = b, v(n), w(n, cplx(0.0)), w1(n), w2(n, cplx(0.0));
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1, cs = -1.0, sn = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t k = 0; k < n; ++k) v[k] = y[k] / beta;
    A(v, y);
    if (it >= 2) axpy(y, -beta / oldb, r1);
    const double alfa = dot(v, y).real();
    axpy(y, -alfa / beta, r2);
    r1 = r2;
    r2 = y;
    oldb = beta;
    beta = std::sqrt(std::abs(dot(r2, r2)));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    w1 = w2;
    w2 = w;
    for (std::size_t k = 0; k < n; ++k) w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) / gamma;
    axpy(x, phi, w);
    res.iterations = it;
    res.relative_residual = phibar / beta1;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    if (beta == 0.0) break;
  }
  return res;
}

}  // namespace hodgelab
