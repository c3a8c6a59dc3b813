#pragma once

#include <string>
#include <vector>

#include "hodgelab/torus.hpp"

namespace hodgelab {

enum class BundleKind { Trivial, Character, CharacterSum, Automorphy };

const char* bundle_kind_name(BundleKind kind);

// Hermitian holomorphic bundle on a fiber. Characters are stored as real vectors
// chi in R^{2n}; the unitary periodic frame has connection form 2 pi i chi.(dx, dy).
// Automorphy bundles use the Landau gauge 2 pi i d y dx; a negative degree denotes
// the dual of the degree |d| bundle.
struct BundleData {
  BundleKind kind = BundleKind::Trivial;
  std::vector<RVec> characters;
  int degree = 0;
  bool end = false;  // End of the underlying bundle, acting by commutators

  int rank() const;        // summands of the underlying bundle
  int components() const;  // rank, or rank^2 for End
  int summand_left(int comp) const;
  int summand_right(int comp) const;
  RVec component_shift(int comp, int n) const;
};

BundleData trivial_bundle();
BundleData character_bundle(const RVec& chi);
BundleData character_sum(const std::vector<RVec>& chis);
BundleData automorphy_bundle(int degree);

struct ChernData {
  std::vector<CVec> theta;  // constant (1,0) connection part per component (flat kinds)
  std::vector<CMat> Theta;  // Theta(a, b) = Theta_{a bbar} per component
};

ChernData chern_data(const BundleData& bundle, const FiberChart& fiber);

BundleData end_bundle(const BundleData& bundle);

// Degree from the curvature form by quadrature of (i / 2 pi) Theta over the fiber.
double automorphy_degree_quadrature(const BundleData& bundle, const FiberChart& fiber, int samples);

// Theta sections of the degree-|d| bundle on C / (Z + tau Z), index j in [0, |d|).
// F(x + 1, y) = F(x, y), F(x, y + 1) = exp(-2 pi i d x) F(x, y) for d > 0.
struct ThetaValue {
  cplx value;
  cplx dtau;  // derivative in tau at fixed (x, y)
};
ThetaValue theta_section(int degree, int j, cplx tau, double x, double y);

}  // namespace hodgelab
