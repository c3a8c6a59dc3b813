#pragma once

#include <string>
#include <vector>

#include "hodgelab/dolbeault.hpp"
#include "hodgelab/family.hpp"

namespace hodgelab {

// Coefficient matrices (in the dz, dzbar frame) of dz^I ^ theta^J, where theta is the
// s-independent dual of dy, with their covariant s- and sbar-derivatives.
struct ScalarFrame {
  CMat value, ds, dsbar;
};
std::vector<ScalarFrame> form_basis(const FiberChart& fiber, const CMat& tau_prime, int p, int q);

// Expected rank of the direct image for (p, q) on a family.
int expected_rank(const FamilyDescriptor& f, int p, int q);

// Closed-form frame of the direct image at s with exact covariant s-derivatives.
// Values are the raw analytic forms (not projected).
std::vector<Representative> analytic_frame(const FamilyDescriptor& f, const FiberState& st, cplx s, int p, int q);

struct HarmonicFrame {
  int p = 0;
  int q = 0;
  SpacePtr space;
  std::vector<Representative> members;  // values harmonic-projected
  CMat gram;                            // gram(k, l) = <psi_k, psi_l>
  double projection_residual = 0.0;
  int rank() const { return static_cast<int>(members.size()); }
};

HarmonicFrame harmonic_frame(const HorizontalData& hd, int p, int q, const SolverOptions& opt = {});

CMat gram_matrix(const std::vector<PQForm>& forms);

}  // namespace hodgelab
