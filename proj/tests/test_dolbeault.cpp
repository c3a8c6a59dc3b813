#include <doctest.h>

#include "families.hpp"
#include "hodgelab/dolbeault.hpp"
#include "hodgelab/errors.hpp"
#include "hodgelab/frames.hpp"

using namespace hodgelab;

namespace {

SpacePtr space_of(const FamilyDescriptor& f, cplx s = 0.0) { return fiber_state(f, s).space; }

double rel(const PQForm& a, const PQForm& b) { return l2_norm(a - b) / std::max(l2_norm(a), l2_norm(b)); }

std::vector<SpacePtr> test_spaces() {
  RVec chi(2);
  chi << 0.3, -0.15;
  const CMat t = CMat::Constant(1, 1, cplx(0.2, 1.1));
  const FiberChart fc = build_fiber(Lattice{1, t}, unit_volume_metric(t));
  return {space_of(testfam::abelian(), cplx(0.05, 0.02)), make_fourier_space(fc, character_bundle(chi), 3),
          space_of(testfam::character_end(), testfam::kCharacterEndPoint), space_of(testfam::theta(1, 48)),
          space_of(testfam::theta(-2, 48))};
}

}  // namespace

TEST_CASE("dbar and del square to zero") {
  for (const auto& sp : test_spaces()) {
    const int n = sp->n();
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q + 2 <= n; ++q) {
        const PQForm psi = random_form(sp, p, q, 5, 2);
        CHECK(l2_norm(dbar(dbar(psi))) <= 1e-9 * l2_norm(psi));
      }
  }
}

TEST_CASE("formal adjoints") {
  for (const auto& sp : test_spaces()) {
    const int n = sp->n();
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q < n; ++q) {
        const PQForm a = random_form(sp, p, q, 11 + p, 2);
        const PQForm b = random_form(sp, p, q + 1, 12 + q, 2);
        const cplx lhs = l2_inner(dbar(a), b), rhs = l2_inner(a, dbar_star(b));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * l2_norm(dbar(a)) * l2_norm(b));
        const PQForm c = random_form(sp, q, p, 13, 2);
        const PQForm d = random_form(sp, q + 1, p, 14, 2);
        CHECK(std::abs(l2_inner(del_h(c), d) - l2_inner(c, del_star(d))) <= 1e-10 * l2_norm(del_h(c)) * l2_norm(d));
      }
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const PQForm a = random_form(sp, p, q, 21, 2), b = random_form(sp, p + 1, q + 1, 22, 2);
        CHECK(std::abs(l2_inner(lefschetz(a), b) - l2_inner(a, lambda(b))) <= 1e-12 * l2_norm(a) * l2_norm(b) * 10);
      }
  }
}

TEST_CASE("Kaehler identity [Lambda, dbar] = -i del*") {
  for (const auto& sp : test_spaces()) {
    const int n = sp->n();
    for (int p = 1; p <= n; ++p)
      for (int q = 0; q < n; ++q) {
        const PQForm psi = random_form(sp, p, q, 31, 2);
        PQForm lhs = lambda(dbar(psi));
        if (q > 0 && p > 0) lhs -= dbar(lambda(psi));
        CHECK(rel(lhs, cplx(0, -1) * del_star(psi)) <= 1e-9);
      }
  }
}

TEST_CASE("[L, Lambda] = p + q - n") {
  for (const auto& sp : test_spaces()) {
    const int n = sp->n();
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q) {
        const PQForm psi = random_form(sp, p, q, 41, 1);
        PQForm out = cplx(-(p + q - n)) * psi;
        if (p > 0 && q > 0) out += lefschetz(lambda(psi));
        if (p < n && q < n) out -= lambda(lefschetz(psi));
        CHECK(l2_norm(out) <= 1e-11 * l2_norm(psi));
      }
  }
}

TEST_CASE("BKN on flat bundles") {
  for (const auto& sp : test_spaces()) {
    if (!sp->flat()) continue;
    for (int p = 0; p <= sp->n(); ++p)
      for (int q = 0; q <= sp->n(); ++q) CHECK(bkn_defect(random_form(sp, p, q, 51 + p + q, 2)) <= 1e-10);
  }
}

TEST_CASE("BKN on the degree-one grid converges at fourth order") {
  double prev = 0.0;
  for (int N : {32, 64, 128}) {
    const SpacePtr sp = space_of(testfam::theta(1, N));
    double worst = 0.0;
    for (int p = 0; p <= 1; ++p)
      for (int q = 0; q <= 1; ++q) worst = std::max(worst, bkn_defect(random_form(sp, p, q, 61, 2)));
    if (prev > 0.0) CHECK(prev / worst >= 8.0);
    prev = worst;
  }
}

TEST_CASE("Green operator inverts the Laplacian off the harmonic space") {
  for (const auto& sp : test_spaces()) {
    const int n = sp->n();
    const bool grid = sp->backend() == Backend::Grid;
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q) {
        const PQForm psi = random_form(sp, p, q, 71, 2);
        const PQForm back = laplacian(green(psi)) + harmonic_projection(psi);
        // On the grid the stencil doublers are in neither term; their overlap is at discretization level.
        CHECK(rel(back, psi) <= (grid ? 1e-5 : 1e-10));
      }
  }
}

TEST_CASE("harmonic spaces have the expected dimension") {
  struct Case {
    FamilyDescriptor f;
    cplx s;
  };
  for (const auto& c : {Case{testfam::elliptic(4), 0.0}, Case{testfam::abelian(), cplx(0.05, 0.02)},
                        Case{testfam::theta(2, 48), 0.0}, Case{testfam::theta(-1, 48), 0.0},
                        Case{testfam::character_end(), testfam::kCharacterEndPoint}}) {
    const SpacePtr sp = space_of(c.f, c.s);
    for (int p = 0; p <= c.f.n; ++p)
      for (int q = 0; q <= c.f.n; ++q)
        CHECK(static_cast<int>(harmonic_basis(sp, p, q).size()) == expected_rank(c.f, p, q));
  }
}

TEST_CASE("nontrivial characters have no harmonic forms") {
  RVec chi(2);
  chi << 0.3, -0.15;
  const CMat t = CMat::Constant(1, 1, cplx(0, 1));
  const SpacePtr sp = make_fourier_space(build_fiber(Lattice{1, t}, unit_volume_metric(t)), character_bundle(chi), 3);
  for (int q = 0; q <= 1; ++q) {
    CHECK(min_eigenvalue(sp, 0, q) > 0.1);
    const PQForm psi = random_form(sp, 0, q, 81, 2);
    CHECK(l2_norm(harmonic_projection(psi)) <= 1e-10 * l2_norm(psi));
  }
}

TEST_CASE("curvature commutator is (p + q - n) for omega = i Theta") {
  const SpacePtr sp = space_of(testfam::theta(1, 32));
  for (int p = 0; p <= 1; ++p)
    for (int q = 0; q <= 1; ++q) {
      const PQForm psi = random_form(sp, p, q, 91, 1);
      CHECK(l2_norm(curvature_commutator(psi) - cplx(p + q - 1) * psi) <= 1e-12 * l2_norm(psi));
    }
}

TEST_CASE("degree errors") {
  const SpacePtr sp = space_of(testfam::elliptic(2));
  const PQForm top = random_form(sp, 1, 1, 1, 1);
  CHECK_THROWS_AS(dbar(top), Error);
  CHECK_NOTHROW(dbar(top, false));
}
