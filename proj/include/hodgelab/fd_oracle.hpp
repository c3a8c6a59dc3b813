#pragma once

#include <array>
#include <functional>

#include "hodgelab/frames.hpp"

namespace hodgelab {

// Gram matrices of a fixed analytic frame on the 3x3 stencil s0 + a h + i b h, a, b in {-1, 0, 1}.
struct GramStencil {
  cplx s0;
  double h = 0.0;
  int p = 0;
  int q = 0;
  std::array<std::array<CMat, 3>, 3> H;  // H[a + 1][b + 1]

  const CMat& at(int a, int b) const { return H[a + 1][b + 1]; }
  const CMat& center() const { return at(0, 0); }
};

GramStencil gram_stencil(const FamilyDescriptor& f, cplx s0, double h, int p, int q);
// Stencil of an arbitrary Gram function, used for synthetic self-tests.
GramStencil gram_stencil(const std::function<CMat(cplx)>& gram, cplx s0, double h);

// R = -d dbar H + dH H^{-1} dbar H at the stencil center.
CMat chern_curvature_fd(const GramStencil& st);

struct Extrapolated {
  CMat value;
  double error = 0.0;
};
// (4 v_{h/2} - v_h) / 3 with error estimate |v_{h/2} - v_h| / 3.
Extrapolated richardson(const CMat& coarse, const CMat& fine);
Extrapolated richardson(const GramStencil& coarse, const GramStencil& fine);

struct FdResult {
  CMat value;       // Richardson-extrapolated curvature tensor
  CMat gram;        // Gram at s0
  CMat coarse, fine;
  double error = 0.0;
  // R / H for rank-1 frames
  double normalized() const;
};

FdResult curvature_fd(const FamilyDescriptor& f, cplx s0, int p, int q, double h = 1e-3);
FdResult curvature_fd(const std::function<CMat(cplx)>& gram, cplx s0, double h = 1e-3);

}  // namespace hodgelab
