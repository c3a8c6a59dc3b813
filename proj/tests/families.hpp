#pragma once

#include "hodgelab/family.hpp"

namespace testfam {

using namespace hodgelab;

inline FamilyDescriptor elliptic(int cutoff = 8, double beta = 0.0) {
  FamilyDescriptor f;
  f.n = 1;
  f.tau0 = CMat::Constant(1, 1, cplx(0, 1));
  f.tau1 = CMat::Constant(1, 1, 1.0);
  f.cutoff = cutoff;
  f.beta = beta;
  return f;
}

inline FamilyDescriptor abelian(double beta = 0.0) {
  FamilyDescriptor f;
  f.n = 2;
  f.tau0.resize(2, 2);
  f.tau0 << cplx(0, 1.2), cplx(0.1, 0.2), cplx(0.1, 0.2), cplx(0.3, 1.0);
  f.tau1.resize(2, 2);
  f.tau1 << 1.0, cplx(0.3, 0.1), cplx(0.3, 0.1), cplx(0, 0.5);
  f.cutoff = 3;
  f.beta = beta;
  return f;
}

// Product family with a diagonal period matrix and no deformation.
inline FamilyDescriptor product_surface() {
  FamilyDescriptor f;
  f.n = 2;
  f.tau0 = CMat::Zero(2, 2);
  f.tau0(0, 0) = cplx(0, 1);
  f.tau0(1, 1) = cplx(0.2, 1.3);
  f.tau1 = CMat::Zero(2, 2);
  f.cutoff = 2;
  return f;
}

inline FamilyDescriptor theta(int degree = 1, int N = 64, double beta = 0.0) {
  FamilyDescriptor f;
  f.kind = FamilyKind::Theta;
  f.n = 1;
  f.tau0 = CMat::Constant(1, 1, cplx(0, 1));
  f.tau1 = CMat::Constant(1, 1, 1.0);
  f.degree = degree;
  f.backend = Backend::Grid;
  f.grid = N;
  f.beta = beta;
  return f;
}

inline FamilyDescriptor character_line(double kappa = 0.7, double beta = 0.0) {
  FamilyDescriptor f;
  f.kind = FamilyKind::Character;
  f.n = 1;
  f.tau0 = CMat::Constant(1, 1, cplx(0, 1));
  f.tau1 = CMat::Zero(1, 1);
  f.summands = {{CVec::Zero(1), kappa}};
  f.cutoff = 6;
  f.beta = beta;
  return f;
}

// End of a sum of two characters with different slopes; evaluate away from s = 0.
inline FamilyDescriptor character_end(double beta = 0.0) {
  FamilyDescriptor f = character_line(0.7, beta);
  f.end = true;
  f.summands.push_back({CVec::Constant(1, cplx(0.25, 0.1)), -0.3});
  return f;
}
inline const cplx kCharacterEndPoint{0.1, 0.05};

}  // namespace testfam
