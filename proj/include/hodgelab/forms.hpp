#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hodgelab/multiindex.hpp"
#include "hodgelab/space.hpp"

namespace hodgelab {

// Bundle-valued (p,q)-form. Coefficients are stored for increasing multi-indices
// only, field-major: ((I * nJ + J) * components + c) * points + pt.
// Bidegrees outside [0, n] are allowed and hold no coefficients (the zero form).
class PQForm {
public:
  PQForm() = default;
  PQForm(SpacePtr space, int p, int q);

  bool valid() const { return static_cast<bool>(space_); }
  int p() const { return p_; }
  int q() const { return q_; }
  int degree() const { return p_ + q_; }
  int n() const { return space_->n(); }
  int nI() const { return nI_; }
  int nJ() const { return nJ_; }
  int comps() const { return comps_; }
  std::size_t npts() const { return npts_; }
  const SpacePtr& space() const { return space_; }
  const FieldSpace& sp() const { return *space_; }

  cplx* field(int I, int J, int c) { return data_.data() + offset(I, J, c); }
  const cplx* field(int I, int J, int c) const { return data_.data() + offset(I, J, c); }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  bool compatible(const PQForm& o) const;
  void require_compatible(const PQForm& o, const char* where) const;

  PQForm& operator+=(const PQForm& o);
  PQForm& operator-=(const PQForm& o);
  PQForm& operator*=(cplx a);
  friend PQForm operator+(PQForm a, const PQForm& b) { return a += b; }
  friend PQForm operator-(PQForm a, const PQForm& b) { return a -= b; }
  friend PQForm operator*(cplx s, PQForm a) { return a *= s; }

  // Max-abs coefficient.
  double max_abs() const;

private:
  std::size_t offset(int I, int J, int c) const {
    return ((static_cast<std::size_t>(I) * nJ_ + J) * comps_ + c) * npts_;
  }
  SpacePtr space_;
  int p_ = 0, q_ = 0, nI_ = 0, nJ_ = 0, comps_ = 0;
  std::size_t npts_ = 0;
  std::vector<cplx> data_;
};

// Fiber-constant tangent-valued (0,1)-form A = A^s_bbar d_s (x) dzbar^b, stored as coef(s, b).
// The conjugate variant stores A^bbar_a d_bbar (x) dz^a as coef(b, a).
struct TangentValuedForm {
  CMat coef;
  bool conjugate = false;
};

// Fiber-constant End-valued form, diagonal in the summands of the bundle:
// per summand i a scalar constant form with coefficients coef[i](I, J).
struct EndForm {
  int n = 1;
  int p = 0;
  int q = 0;
  std::vector<CMat> coef;

  static EndForm zero(int n, int p, int q, int summands);
  int summands() const { return static_cast<int>(coef.size()); }
  double max_abs() const;
};

// Weight W(A nJ + B, C nJ + D) of the pointwise pairing between dz^A dzbar^B and dz^C dzbar^D.
CMat pairing_weights(const FiberChart& fiber, int p, int q);

// Pointwise hermitian form and L2 pairing (sum over increasing indices).
cplx l2_inner(const PQForm& phi, const PQForm& psi);
double l2_norm(const PQForm& psi);

// Same pairing computed from fully skew-symmetrized coefficients with 1/(p! q!) weights.
cplx l2_inner_full_sum(const PQForm& phi, const PQForm& psi);

// Elementary operations (out-of-range target types give empty forms).
PQForm wedge_dz(const PQForm& psi, int a);      // dz^a ^ psi
PQForm wedge_dzbar(const PQForm& psi, int b);   // dzbar^b ^ psi
PQForm contract_dz(const PQForm& psi, int a);   // coefficient insertion psi_{a A', B}
PQForm contract_dzbar(const PQForm& psi, int b);  // coefficient insertion psi_{A, b B'}
PQForm iota(const PQForm& psi, int a);          // interior product with d/dz^a
PQForm iota_bar(const PQForm& psi, int b);      // interior product with d/dzbar^b

void axpy(PQForm& y, cplx a, const PQForm& x);

// Cup products. Forward: (A cup psi) = A^s_bbar dzbar^b ^ (psi_{s ...}); conjugate:
// (A cup psi) = A^bbar_a dz^a ^ (psi_{... b ...}) with the barred insertion.
PQForm cup(const TangentValuedForm& A, const PQForm& psi);
PQForm cup_soft(const TangentValuedForm& A, const PQForm& psi);

// Graded wedge eta ^ psi with module action (E-valued psi) or commutator (End-valued psi).
PQForm wedge_end(const EndForm& eta, const PQForm& psi);

// Multiplication by a fiber-constant End-valued function (p = q = 0).
PQForm act_end(const EndForm& f, const PQForm& psi);

// Constant form on the zero mode with the given per-component scalar coefficients.
PQForm constant_form(const SpacePtr& space, int p, int q, const std::vector<CMat>& coef_per_component);

// Deterministic standard complex Gaussian coefficients. On the grid backend the
// coefficients multiply a smooth basis (low trigonometric modes times theta sections).
PQForm random_form(const SpacePtr& space, int p, int q, std::uint64_t seed, int max_mode = 0);

std::string serialize_form(const PQForm& psi);

}  // namespace hodgelab
