#include "hodgelab/bundles.hpp"

#include <cmath>

#include "hodgelab/errors.hpp"

namespace hodgelab {

const char* bundle_kind_name(BundleKind kind) {
  switch (kind) {
    case BundleKind::Trivial: return "trivial";
    case BundleKind::Character: return "character";
    case BundleKind::CharacterSum: return "character_sum";
    case BundleKind::Automorphy: return "automorphy";
  }
  return "unknown";
}

int BundleData::rank() const {
  if (kind == BundleKind::Character || kind == BundleKind::CharacterSum)
    return static_cast<int>(characters.size());
  return 1;
}

int BundleData::components() const { return end ? rank() * rank() : rank(); }

int BundleData::summand_left(int comp) const { return end ? comp / rank() : comp; }

int BundleData::summand_right(int comp) const { return end ? comp % rank() : comp; }

RVec BundleData::component_shift(int comp, int n) const {
  if (kind == BundleKind::Trivial || kind == BundleKind::Automorphy) return RVec::Zero(2 * n);
  if (!end) return characters.at(comp);
  return characters.at(summand_left(comp)) - characters.at(summand_right(comp));
}

BundleData trivial_bundle() { return {}; }

BundleData character_bundle(const RVec& chi) {
  BundleData b;
  b.kind = BundleKind::Character;
  b.characters = {chi};
  return b;
}

BundleData character_sum(const std::vector<RVec>& chis) {
  if (chis.empty()) fail(ErrorCode::Precondition, "character sum needs at least one summand");
  BundleData b;
  b.kind = chis.size() == 1 ? BundleKind::Character : BundleKind::CharacterSum;
  b.characters = chis;
  return b;
}

BundleData automorphy_bundle(int degree) {
  if (degree == 0) fail(ErrorCode::InconsistentAutomorphy, "automorphy bundle needs nonzero degree");
  BundleData b;
  b.kind = BundleKind::Automorphy;
  b.degree = degree;
  return b;
}

ChernData chern_data(const BundleData& bundle, const FiberChart& fiber) {
  const int n = fiber.n();
  ChernData cd;
  if (bundle.kind == BundleKind::Automorphy) {
    if (n != 1) fail(ErrorCode::Unsupported, "automorphy bundles are implemented for n = 1");
    if (bundle.end) fail(ErrorCode::Unsupported, "End of an automorphy bundle");
    if (bundle.degree == 0) fail(ErrorCode::InconsistentAutomorphy, "degree zero automorphy data");
    // Theta = dbar(d phi) with phi = 2 pi d (Im z)^2 / Im tau.
    CMat Th(1, 1);
    Th(0, 0) = 2.0 * kPi * kI * static_cast<double>(bundle.degree) / fiber.delta(0, 0);
    cd.theta.push_back(CVec::Zero(1));
    cd.Theta.push_back(Th);
    return cd;
  }
  for (int c = 0; c < bundle.components(); ++c) {
    cd.theta.push_back(fiber.zeta(bundle.component_shift(c, n)));
    cd.Theta.push_back(CMat::Zero(n, n));
  }
  return cd;
}

BundleData end_bundle(const BundleData& bundle) {
  if (bundle.kind == BundleKind::Automorphy) fail(ErrorCode::Unsupported, "End of an automorphy bundle");
  if (bundle.end) fail(ErrorCode::Unsupported, "End of an End bundle");
  BundleData e = bundle;
  if (e.kind == BundleKind::Trivial) return e;
  e.end = true;
  return e;
}

double automorphy_degree_quadrature(const BundleData& bundle, const FiberChart& fiber, int samples) {
  if (fiber.n() != 1) fail(ErrorCode::Unsupported, "degree quadrature is implemented for n = 1");
  ChernData cd = chern_data(bundle, fiber);
  // dz ^ dzbar = -2i dx' ^ dy' in Euclidean coordinates; the fundamental domain has area Im tau.
  const double t = fiber.tau()(0, 0).imag();
  const double h = 1.0 / samples;
  cplx total = 0.0;
  for (int j = 0; j < samples; ++j)
    for (int i = 0; i < samples; ++i) total += cd.Theta[0](0, 0) * (-2.0 * kI) * t * h * h;
  return (kI / (2.0 * kPi) * total).real();
}

namespace {

// Range of summation indices m with non-negligible Gaussian weight exp(-pi t (m + d y)^2 / d).
void theta_range(int d, double t, double y, int& lo, int& hi) {
  const double width = std::sqrt(45.0 * d / (kPi * t)) + 2.0;
  const double center = -d * y;
  lo = static_cast<int>(std::floor(center - width));
  hi = static_cast<int>(std::ceil(center + width));
}

}  // namespace

ThetaValue theta_section(int degree, int j, cplx tau, double x, double y) {
  const int d = std::abs(degree);
  if (d == 0) fail(ErrorCode::InconsistentAutomorphy, "theta section of degree zero");
  int lo, hi;
  theta_range(d, tau.imag(), y, lo, hi);
  ThetaValue out{0.0, 0.0};
  int start = lo - (((lo - j) % d) + d) % d;
  for (int m = start; m <= hi; m += d) {
    const double u = m + d * y;
    cplx term = std::exp(kPi * kI * tau * (u * u / d) + 2.0 * kPi * kI * (m * x));
    out.value += term;
    out.dtau += kPi * kI * (u * u / d) * term;
  }
  if (degree < 0) {
    out.value = std::conj(out.value);
    out.dtau = std::conj(out.dtau);  // derivative in conj(tau)
  }
  return out;
}

}  // namespace hodgelab
