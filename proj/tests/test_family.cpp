#include <doctest.h>

#include "families.hpp"
#include "hodgelab/errors.hpp"
#include "hodgelab/family.hpp"

using namespace hodgelab;

namespace {

// Schur complement of the fiber block in the total Hessian.
double schur_c(const CMat& G) {
  const int n = static_cast<int>(G.rows()) - 1;
  const CMat g = G.block(1, 1, n, n);
  return (G(0, 0) - (G.block(0, 1, 1, n) * g.inverse() * G.block(1, 0, n, 1))(0, 0)).real();
}

}  // namespace

TEST_CASE("tau is affine in s") {
  const auto f = testfam::abelian();
  const cplx s(0.03, -0.02);
  CHECK((tau_at(f, s) - f.tau0 - s * f.tau1).norm() < 1e-15);
}

TEST_CASE("Kodaira-Spencer data") {
  for (const auto& f : {testfam::elliptic(), testfam::abelian()}) {
    const cplx s(0.05, 0.02);
    const HorizontalData hd = horizontal_data(f, s);
    const CMat tau = tau_at(f, s);
    const CMat K = f.tau1 * (tau - tau.conjugate()).inverse();
    CHECK((hd.K - K).norm() < 1e-13);
    CHECK((hd.tau_prime - f.tau1).norm() == 0.0);
  }
}

TEST_CASE("geodesic curvature is the Schur complement and is fiber-constant") {
  for (double beta : {0.0, 0.5, -2.0}) {
    for (const auto& f : {testfam::elliptic(4, beta), testfam::abelian(beta), testfam::theta(1, 32, beta),
                          testfam::character_line(0.7, beta)}) {
      const HorizontalData hd = horizontal_data(f, 0.0);
      for (const auto& w : fiber_samples(f.n)) CHECK(schur_c(total_metric(f, 0.0, w)) == doctest::Approx(hd.c).epsilon(1e-12));
      CHECK(hd.c == doctest::Approx(beta).epsilon(1e-12));
    }
  }
}

TEST_CASE("horizontal lift is omega-orthogonal to the fibers") {
  for (const auto& f : {testfam::elliptic(), testfam::abelian(0.3)}) {
    const cplx s(0.02, 0.01);
    const HorizontalData hd = horizontal_data(f, s);
    const int n = f.n;
    for (const auto& w : fiber_samples(n)) {
      const CMat G = total_metric(f, s, w);
      const CVec a = hd.a_map * w.cast<cplx>();
      const CMat res = G.block(0, 1, 1, n) + a.transpose() * G.block(1, 1, n, n);
      CHECK(res.norm() < 1e-12 * (1 + G.norm()));
      // det G = c det g
      CHECK(std::abs(G.determinant() - hd.c * G.block(1, 1, n, n).determinant()) < 1e-12 * (1 + std::abs(G.determinant())));
    }
    CHECK(lie_omega_defect(hd) < 1e-12);
    CHECK(horizontality_defect(hd) < 1e-12);
    CHECK(semmes_defect(hd) < 1e-12);
  }
}

TEST_CASE("Semmes defect detects a wrong c") {
  const HorizontalData hd = horizontal_data(testfam::abelian(0.3), 0.0);
  CHECK(semmes_defect(hd, 0.1) > 1e-3);
}

TEST_CASE("bracket of the horizontal lift vanishes for constant c") {
  const HorizontalData hd = horizontal_data(testfam::abelian(0.7), cplx(0.01, 0.04));
  for (const auto& w : fiber_samples(2)) CHECK(lift_bracket(hd, w).norm() < 1e-12);
}

TEST_CASE("Atiyah forms of character families") {
  auto f = testfam::character_end();
  const HorizontalData hd = horizontal_data(f, testfam::kCharacterEndPoint);
  // eta_sbar is minus the adjoint of eta_s
  for (int i = 0; i < hd.eta_s.summands(); ++i)
    CHECK((hd.eta_sbar.coef[i] + hd.eta_s.coef[i].adjoint()).norm() < 1e-15);
  CHECK(hd.eta_s.max_abs() > 0.1);
  CHECK(hd.A.coef.norm() == 0.0);
}

TEST_CASE("family validation") {
  auto f = testfam::theta();
  f.backend = Backend::Fourier;
  CHECK_THROWS_AS(validate_family(f), Error);
  auto g = testfam::elliptic();
  g.tau0 = CMat::Constant(1, 1, cplx(0, -1));
  CHECK_THROWS_AS(horizontal_data(g, 0.0), Error);
  auto h = testfam::character_line();
  h.tau1 = CMat::Constant(1, 1, 1.0);
  CHECK_THROWS_AS(validate_family(h), Error);
}
