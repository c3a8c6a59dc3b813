#pragma once

#include <string>
#include <vector>

#include "hodgelab/forms.hpp"

namespace hodgelab {

enum class FamilyKind { ComplexStructure, Theta, Character };

const char* family_kind_name(FamilyKind kind);

// One summand of a character family: on the fiber over s it has dbar-shift s * conj(ell),
// and its total-space curvature is Theta_{s bbar} = conj(ell_b), Theta_{a sbar} = ell_a, Theta_{s sbar} = kappa.
struct CharacterSummand {
  CVec ell;
  double kappa = 0.0;
};

// One-parameter family over a disc in C. The complex structure is tau(s) = tau0 + s tau1
// (tau1 = 0 for character families). The total-space Kaehler form is i ddbar of
// scale * (Im z)^T (Im tau)^{-1} (Im z) plus beta i ds ^ dsbar.
struct FamilyDescriptor {
  FamilyKind kind = FamilyKind::ComplexStructure;
  int n = 1;
  CMat tau0;
  CMat tau1;
  int degree = 0;                          // Theta: signed degree, negative for the dual
  std::vector<CharacterSummand> summands;  // Character
  bool end = false;                        // Character: use End of the sum
  double beta = 0.0;
  Backend backend = Backend::Fourier;
  int cutoff = 4;
  int grid = 64;
};

CMat tau_at(const FamilyDescriptor& f, cplx s);
double metric_scale(const FamilyDescriptor& f);
bool is_product_family(const FamilyDescriptor& f);
void validate_family(const FamilyDescriptor& f);

struct FiberState {
  FiberChart fiber;
  BundleData bundle;
  SpacePtr space;
};

FiberState fiber_state(const FamilyDescriptor& f, cplx s);
// Same fiber with the End bundle of the family bundle (identity for line bundles without twist).
SpacePtr end_space(const FiberState& st, const FamilyDescriptor& f);

// Hessian of the total-space Kaehler potential at a fiber point with Im z = w.
// Index 0 is s, indices 1..n are the fiber coordinates; entry (i, j) is the (i, jbar) coefficient.
CMat total_metric(const FamilyDescriptor& f, cplx s, const RVec& w);
// Curvature of the family bundle on the total space, per summand, in the same layout.
std::vector<CMat> total_curvature(const FamilyDescriptor& f, cplx s, const RVec& w);

struct HorizontalData {
  FamilyDescriptor family;
  cplx s;
  FiberState state;
  CMat tau, tau_prime;
  CMat a_map;  // a^alpha = sum_k a_map(alpha, k) (Im z)_k
  CMat K, Kbar;
  TangentValuedForm A;     // A^alpha_bbar from dbar of the horizontal lift
  TangentValuedForm Abar;  // conjugate tensor
  double c = 0.0;          // geodesic curvature c(omega), constant on fibers
  EndForm eta_s;           // (0,1)
  EndForm eta_sbar;        // (1,0)
  EndForm theta_vv;        // Theta(v, vbar)
  EndForm theta_ss;        // Theta_{s sbar}
  EndForm ds_curvature;    // [nabla_s, nabla_sbar] on coefficients in the fiber frame

  int n() const { return state.fiber.n(); }
  const SpacePtr& space() const { return state.space; }
};

HorizontalData horizontal_data(const FamilyDescriptor& f, cplx s);

// Sample points Im z used for pointwise checks.
std::vector<RVec> fiber_samples(int n);

// max over samples of |det G - c det g| times the fiber volume factor; c_shift perturbs c.
double semmes_defect(const HorizontalData& hd, double c_shift = 0.0);

// max over samples of |omega(v, wbar)| for vertical w
double horizontality_defect(const HorizontalData& hd);

// Coefficients of [v, vbar] along d/dz^alpha at the fiber point with Im z = w.
CVec lift_bracket(const HorizontalData& hd, const RVec& w);

// Restriction of L_v omega to the fiber: returns the max coefficient of its (1,1) and (0,2) parts.
double lie_omega_defect(const HorizontalData& hd);

// A fiber form together with the covariant s-derivatives of its coefficients in the dz, dzbar frame.
struct Representative {
  PQForm value;
  PQForm ds;
  PQForm dsbar;
  bool analytic = true;
};

struct LieComponents {
  PQForm lv1;   // L'_v
  PQForm lv2;   // L''_v
  PQForm lvb1;  // L'_vbar
  PQForm lvb2;  // L''_vbar
};

// Derivation of the form algebra extending dz^a -> sum_b T(a, b) dz^b (holomorphic) or
// dzbar^a -> sum_b T(a, b) dzbar^b (antiholomorphic).
PQForm holo_derivation(const PQForm& psi, const CMat& T);
PQForm antiholo_derivation(const PQForm& psi, const CMat& T);

LieComponents lie_components(const HorizontalData& hd, const Representative& rep);

// Materialize a fiber-constant End form on a space of the matching bundle.
PQForm materialize(const EndForm& e, const SpacePtr& space);

}  // namespace hodgelab
