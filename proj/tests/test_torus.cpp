#include <doctest.h>

#include <cmath>

#include "hodgelab/multiindex.hpp"
#include "hodgelab/torus.hpp"

using namespace hodgelab;

namespace {

FiberChart chart(const CMat& tau) { return build_fiber(Lattice{static_cast<int>(tau.rows()), tau}, unit_volume_metric(tau)); }

CMat surface_tau() {
  CMat t(2, 2);
  t << cplx(0.1, 1.2), cplx(0.1, 0.2), cplx(0.1, 0.2), cplx(0.3, 1.0);
  return t;
}

}  // namespace

TEST_CASE("unit volume metric gives volume one") {
  CHECK(chart(CMat::Constant(1, 1, cplx(0.3, 1.7))).volume() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(chart(surface_tau()).volume() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("euclidean covolume is det Im tau") {
  const CMat t = surface_tau();
  CHECK(chart(t).euclidean_covolume() == doctest::Approx(RMat(t.imag()).determinant()).epsilon(1e-13));
}

TEST_CASE("symbols match the derivative of a plane wave in z") {
  const cplx tau(0.3, 1.7);
  const FiberChart fc = chart(CMat::Constant(1, 1, tau));
  RVec f(2);
  f << 2.0, -1.0;
  // x = (tau zbar - conj(tau) z) / (tau - conj(tau)) and y = (z - zbar) / (tau - conj(tau))
  const cplx d = tau - std::conj(tau);
  const cplx dz = 2.0 * kPi * kI * (-std::conj(tau) * f[0] + f[1]) / d;
  const cplx dzbar = 2.0 * kPi * kI * (tau * f[0] - f[1]) / d;
  CHECK(std::abs(fc.zeta(f)[0] - dz) < 1e-12);
  CHECK(std::abs(fc.zeta_bar(f)[0] - dzbar) < 1e-12);
}

TEST_CASE("mode sets are lexicographic and indexable") {
  const ModeSet ms = mode_set(2, 2);
  CHECK(ms.size() == 625);
  for (std::size_t k = 1; k < ms.size(); ++k) {
    const auto& a = ms.modes[k - 1];
    const auto& b = ms.modes[k];
    CHECK(std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size()));
  }
  for (std::size_t k = 0; k < ms.size(); k += 37) CHECK(ms.index_of(ms.modes[k]) == static_cast<int>(k));
  CHECK(ms.modes[ms.zero_index].isZero());
}

TEST_CASE("character shift round trip") {
  const FiberChart fc = chart(surface_tau());
  CVec c(2);
  c << cplx(0.3, -0.1), cplx(-0.2, 0.4);
  const RVec chi = character_from_dbar_shift(fc, c);
  CHECK((fc.zeta_bar(chi) - c).norm() < 1e-12);
}

TEST_CASE("multi-index signs") {
  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k <= n; ++k) CHECK(static_cast<int>(subsets(n, k).size()) == binom(n, k));
  const int n = 4;
  for (int ka = 0; ka <= n; ++ka)
    for (Mask a : subsets(n, ka))
      for (int kb = 0; kb + ka <= n; ++kb)
        for (Mask b : subsets(n, kb)) {
          if (a & b) continue;
          const int graded = (ka * kb) % 2 ? -1 : 1;
          CHECK(merge_sign(a, b) == graded * merge_sign(b, a));
        }
  // dz^2 ^ dz^0 ^ dz^1 = dz^0 ^ dz^1 ^ dz^2
  CHECK(merge_sign(0b100, 0b011) == 1);
  CHECK(merge_sign(0b010, 0b101) == -1);
  CHECK(front_sign(0b101, 1) == -1);
}
