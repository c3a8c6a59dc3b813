#pragma once

#include <functional>
#include <vector>

#include "hodgelab/torus.hpp"

namespace hodgelab {

using Vec = std::vector<cplx>;
using LinearOp = std::function<void(const Vec&, Vec&)>;
using InnerProduct = std::function<cplx(const Vec&, const Vec&)>;

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Conjugate gradients for a hermitian positive (semi-)definite operator.
KrylovResult conjugate_gradient(const LinearOp& A, const InnerProduct& dot, const Vec& b, Vec& x, double tol,
                                int max_iter);

// MINRES for a hermitian, possibly indefinite operator.
KrylovResult minres(const LinearOp& A, const InnerProduct& dot, const Vec& b, Vec& x, double tol, int max_iter);

}  // namespace hodgelab
