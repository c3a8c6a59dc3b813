#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hodgelab/curvature.hpp"

namespace hodgelab {

struct IdentityResult {
  std::string name;
  bool applicable = true;
  bool informational = false;  // reported, never gates the suite
  double defect = 0.0;         // relative defect, max over bidegrees and representatives
  double tolerance = 0.0;
  std::string note;            // skip reason or worst bidegree

  bool pass() const { return !applicable || informational || defect <= tolerance; }
};

struct IdentityReport {
  std::vector<IdentityResult> results;
  bool pass() const;
  const IdentityResult* find(const std::string& name) const;
};

struct IdentityOptions {
  std::uint64_t seed = 1;
  double tolerance = 1e-8;       // Fourier backend
  double grid_tolerance = 1e-3;  // grid backend
  int max_mode = 2;              // random forms use modes with |k| <= max_mode
  SolverOptions solver;
};

const std::vector<std::string>& identity_names();

IdentityReport identity_suite(const FamilyDescriptor& f, cplx s, const IdentityOptions& opt = {});

// Derivations used as independent references for the type-changing Lie derivative parts:
// dz^a -> sum_b T(a, b) dzbar^b and dzbar^a -> sum_b T(a, b) dz^b.
PQForm mixed_derivation_holo(const PQForm& psi, const CMat& T);
PQForm mixed_derivation_antiholo(const PQForm& psi, const CMat& T);

}  // namespace hodgelab
