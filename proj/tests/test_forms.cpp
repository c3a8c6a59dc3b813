#include <doctest.h>

#include "hodgelab/forms.hpp"

using namespace hodgelab;

namespace {

SpacePtr surface_space(int cutoff = 2) {
  CMat t(2, 2);
  t << cplx(0.1, 1.2), cplx(0.1, 0.2), cplx(0.1, 0.2), cplx(0.3, 1.0);
  return make_fourier_space(build_fiber(Lattice{2, t}, unit_volume_metric(t)), trivial_bundle(), cutoff);
}

}  // namespace

TEST_CASE("L2 pairing agrees with the fully skew-symmetrized sum") {
  const SpacePtr sp = surface_space();
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      const PQForm a = random_form(sp, p, q, 10 + p * 3 + q, 1);
      const PQForm b = random_form(sp, p, q, 40 + p * 3 + q, 1);
      const cplx x = l2_inner(a, b), y = l2_inner_full_sum(a, b);
      CHECK(std::abs(x - y) <= 1e-12 * std::abs(x));
      CHECK(std::abs(l2_inner(b, a) - std::conj(x)) <= 1e-12 * std::abs(x));
      CHECK(l2_norm(a) > 0.0);
    }
}

TEST_CASE("interior products anticommute with wedges to the identity") {
  const SpacePtr sp = surface_space(1);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      const PQForm psi = random_form(sp, p, q, 3 + p + 5 * q, 1);
      for (int a = 0; a < 2; ++a) {
        PQForm sum(sp, p, q);
        if (p < 2) axpy(sum, 1.0, iota(wedge_dz(psi, a), a));
        if (p > 0) axpy(sum, 1.0, wedge_dz(iota(psi, a), a));
        // {iota_a, dz^b ^} = delta_ab, summed over the sub-bases that contain or miss a
        CHECK(l2_norm(sum - psi) <= 1e-12 * l2_norm(psi));
        PQForm sumb(sp, p, q);
        if (q < 2) axpy(sumb, 1.0, iota_bar(wedge_dzbar(psi, a), a));
        if (q > 0) axpy(sumb, 1.0, wedge_dzbar(iota_bar(psi, a), a));
        CHECK(l2_norm(sumb - psi) <= 1e-12 * l2_norm(psi));
      }
    }
}

TEST_CASE("cup product of a constant tensor on dz") {
  const CMat t = CMat::Constant(1, 1, cplx(0, 1));
  const SpacePtr sp = make_fourier_space(build_fiber(Lattice{1, t}, unit_volume_metric(t)), trivial_bundle(), 1);
  const PQForm dz = constant_form(sp, 1, 0, {CMat::Constant(1, 1, 1.0)});
  const TangentValuedForm A{CMat::Constant(1, 1, cplx(0.3, -0.2)), false};
  const PQForm out = cup(A, dz);
  CHECK(out.p() == 0);
  CHECK(out.q() == 1);
  CHECK(std::abs(sp->constant_part(out.field(0, 0, 0)) - cplx(0.3, -0.2)) < 1e-15);
}

TEST_CASE("vector space operations") {
  const SpacePtr sp = surface_space(1);
  const PQForm a = random_form(sp, 1, 1, 1, 1), b = random_form(sp, 1, 1, 2, 1);
  CHECK(l2_norm((a + b) - b - a) < 1e-13 * l2_norm(a));
  CHECK(std::abs(l2_inner(cplx(0, 2) * a, b) - cplx(0, 2) * l2_inner(a, b)) < 1e-12 * l2_norm(a) * l2_norm(b));
  CHECK_THROWS(a + random_form(sp, 1, 0, 3, 1));
}

TEST_CASE("random forms are deterministic") {
  const SpacePtr sp = surface_space(1);
  CHECK(serialize_form(random_form(sp, 1, 2, 9, 1)) == serialize_form(random_form(sp, 1, 2, 9, 1)));
  CHECK(serialize_form(random_form(sp, 1, 2, 9, 1)) != serialize_form(random_form(sp, 1, 2, 10, 1)));
}
