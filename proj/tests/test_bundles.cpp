#include <doctest.h>

#include <cmath>

#include "hodgelab/bundles.hpp"

using namespace hodgelab;

namespace {

FiberChart elliptic_chart(cplx tau, double scale = 1.0) {
  const CMat t = CMat::Constant(1, 1, tau);
  return build_fiber(Lattice{1, t}, scale * unit_volume_metric(t));
}

}  // namespace

TEST_CASE("automorphy degree from curvature quadrature") {
  for (int d : {1, 2, 3, -1, -2}) {
    const FiberChart fc = elliptic_chart(cplx(0.2, 1.1), 2 * kPi * std::abs(d));
    CHECK(automorphy_degree_quadrature(automorphy_bundle(d), fc, 64) == doctest::Approx(d).epsilon(1e-10));
  }
}

TEST_CASE("flat bundles have no curvature") {
  const FiberChart fc = elliptic_chart(cplx(0, 1));
  RVec chi(2);
  chi << 0.3, -0.1;
  for (const auto& b : {trivial_bundle(), character_bundle(chi), end_bundle(character_sum({chi, RVec::Zero(2)}))}) {
    const ChernData cd = chern_data(b, fc);
    for (const auto& T : cd.Theta) CHECK(T.norm() == 0.0);
  }
}

TEST_CASE("theta sections are quasi-periodic") {
  const cplx tau(0.25, 0.9);
  for (int d : {1, 2, 3})
    for (int j = 0; j < d; ++j)
      for (double x : {0.1, 0.37, 0.8})
        for (double y : {0.05, 0.5, 0.71}) {
          const cplx f = theta_section(d, j, tau, x, y).value;
          CHECK(std::abs(theta_section(d, j, tau, x + 1, y).value - f) < 1e-10 * (1 + std::abs(f)));
          const cplx up = theta_section(d, j, tau, x, y + 1).value;
          CHECK(std::abs(up - std::exp(-2.0 * kPi * kI * (d * x)) * f) < 1e-10 * (1 + std::abs(f)));
        }
}

TEST_CASE("theta tau-derivative matches central differences") {
  const cplx tau(0.1, 1.05);
  const double h = 1e-5;
  for (int d : {1, 2})
    for (int j = 0; j < d; ++j) {
      const double x = 0.3, y = 0.6;
      const cplx fd = (theta_section(d, j, tau + h, x, y).value - theta_section(d, j, tau - h, x, y).value) / (2 * h);
      const cplx an = theta_section(d, j, tau, x, y).dtau;
      CHECK(std::abs(fd - an) < 1e-6 * (1 + std::abs(an)));
      // holomorphic in tau: the i h difference gives the same derivative
      const cplx fdi = (theta_section(d, j, tau + cplx(0, h), x, y).value -
                        theta_section(d, j, tau - cplx(0, h), x, y).value) / (2.0 * cplx(0, h));
      CHECK(std::abs(fdi - an) < 1e-6 * (1 + std::abs(an)));
    }
}

TEST_CASE("End bundle bookkeeping") {
  RVec a = RVec::Zero(2), b(2);
  b << 0.2, 0.4;
  const BundleData e = end_bundle(character_sum({a, b}));
  CHECK(e.end);
  CHECK(e.rank() == 2);
  CHECK(e.components() == 4);
  for (int c = 0; c < 4; ++c) {
    const RVec shift = e.component_shift(c, 1);
    const RVec expect = (e.summand_left(c) == 0 ? a : b) - (e.summand_right(c) == 0 ? a : b);
    CHECK((shift - expect).norm() < 1e-15);
  }
}
