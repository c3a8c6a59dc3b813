#include <doctest.h>

#include "families.hpp"
#include "hodgelab/errors.hpp"
#include "hodgelab/fd_oracle.hpp"

using namespace hodgelab;

namespace {

CMat scalar(cplx v) { return CMat::Constant(1, 1, v); }

// Gram of a rank-2 bundle with metric exp(|s|^2) on the first line and a holomorphic rescale on the second.
CMat synthetic(cplx s) {
  CMat g = CMat::Zero(2, 2);
  g(0, 0) = std::exp(std::norm(s));
  g(1, 1) = std::norm(1.0 + 0.5 * s) * std::exp(2.0 * std::norm(s));
  return g;
}

}  // namespace

TEST_CASE("constant Gram has zero curvature") {
  const auto r = curvature_fd([](cplx) { return scalar(2.5); }, 0.3);
  CHECK(std::abs(r.value(0, 0)) < 1e-12);
}

TEST_CASE("exp(s sbar) has curvature -1") {
  for (cplx s0 : {cplx(0.0), cplx(0.2, -0.1)}) {
    const auto r = curvature_fd([](cplx s) { return scalar(std::exp(std::norm(s))); }, s0);
    CHECK(std::abs(r.normalized() + 1.0) < 1e-6);
    CHECK(std::abs(r.value(0, 0).imag()) < 1e-9);
  }
}

TEST_CASE("matrix curvature of a diagonal metric") {
  const cplx s0(0.1, 0.05);
  const auto r = curvature_fd(synthetic, s0);
  const CMat g = synthetic(s0);
  CHECK(std::abs(r.value(0, 0) / g(0, 0) + 1.0) < 1e-6);
  CHECK(std::abs(r.value(1, 1) / g(1, 1) + 2.0) < 1e-6);
  CHECK(std::abs(r.value(0, 1)) < 1e-12);
}

TEST_CASE("stencil error is second order") {
  auto gram = [](cplx s) { return scalar(std::exp(std::norm(s) + 0.3 * std::pow(std::norm(s), 2))); };
  const cplx s0(0.4, 0.2);
  const auto fine = curvature_fd(gram, s0, 1e-3);
  const double exact = fine.value(0, 0).real();
  std::vector<double> err;
  for (double h : {4e-3, 2e-3, 1e-3}) {
    const CMat raw = chern_curvature_fd(gram_stencil(gram, s0, h));
    err.push_back(std::abs(raw(0, 0).real() - exact));
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("Richardson cancels the h^2 term") {
  const CMat c = scalar(cplx(1.5, -0.5));
  const CMat k = scalar(3.0);
  const double h = 1e-2;
  const auto e = richardson(CMat(c + k * h * h), CMat(c + k * h * h / 4.0));
  CHECK((e.value - c).norm() < 1e-14);
  CHECK(e.error == doctest::Approx(k(0, 0).real() * h * h / 4.0).epsilon(1e-9));
  CHECK_THROWS_AS(richardson(scalar(1.0), CMat::Zero(2, 2)), Error);
}

TEST_CASE("Richardson needs matching stencils") {
  auto gram = [](cplx s) { return scalar(std::exp(std::norm(s))); };
  const auto a = gram_stencil(gram, 0.0, 2e-3);
  CHECK_THROWS_AS(richardson(a, gram_stencil(gram, 0.1, 1e-3)), Error);
  CHECK_THROWS_AS(richardson(a, gram_stencil(gram, 0.0, 1.5e-3)), Error);
  CHECK_NOTHROW(richardson(a, gram_stencil(gram, 0.0, 1e-3)));
}

TEST_CASE("ill-conditioned Gram is rejected") {
  auto gram = [](cplx) {
    CMat g = CMat::Identity(2, 2);
    g(1, 1) = 1e-12;
    return g;
  };
  CHECK_THROWS_AS(curvature_fd(gram, 0.0), Error);
}

TEST_CASE("curvature is frame covariant") {
  // A holomorphic rescale of the frame leaves the normalized curvature unchanged.
  const cplx s0(0.1, 0.05);
  auto g1 = [](cplx s) { return scalar(std::exp(std::norm(s))); };
  auto g2 = [](cplx s) { return scalar(std::norm(2.0 + s) * std::exp(std::norm(s))); };
  const auto a = curvature_fd(g1, s0);
  const auto b = curvature_fd(g2, s0);
  CHECK(b.normalized() == doctest::Approx(a.normalized()).epsilon(1e-6));
}

TEST_CASE("elliptic family Gram curvature") {
  const auto r = curvature_fd(testfam::elliptic(), 0.0, 1, 0, 1e-2);
  CHECK(r.normalized() == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r.error < 1e-6);
  const auto d = curvature_fd(testfam::elliptic(), 0.0, 0, 1, 1e-2);
  CHECK(d.normalized() == doctest::Approx(-0.25).epsilon(1e-6));
}

TEST_CASE("fd oracle errors") {
  auto f = testfam::elliptic();
  CHECK_THROWS_AS(curvature_fd(f, cplx(0, -2.0), 1, 0), Error);
  CHECK_THROWS_AS(curvature_fd(testfam::theta(1, 16), 0.0, 0, 1), Error);
}
