#pragma once

#include "hodgelab/forms.hpp"

namespace hodgelab {

enum class Which { Dbar, Del };

// Operators raise DegreeError when the source bidegree is outside their range;
// with strict = false they return the zero form of the (possibly empty) target type.
PQForm dbar(const PQForm& psi, bool strict = true);
PQForm del_h(const PQForm& psi, bool strict = true);
PQForm dbar_star(const PQForm& psi, bool strict = true);
PQForm del_star(const PQForm& psi, bool strict = true);
PQForm lefschetz(const PQForm& psi, bool strict = true);
PQForm lambda(const PQForm& psi, bool strict = true);

PQForm laplacian(const PQForm& psi, Which which = Which::Dbar);

// [i Theta, Lambda] from the explicit index formula.
PQForm curvature_commutator(const PQForm& psi);

// ||(box_dbar - box_del - [i Theta, Lambda]) psi|| / ||psi||
double bkn_defect(const PQForm& psi);
// ||(box_dbar - box_del - c) psi|| / ||psi|| for a scalar c
double bkn_scalar_defect(const PQForm& psi, double c);

struct SolverOptions {
  double tolerance = 1e-9;
  double harmonic_threshold = 1e-8;  // spectral cut for the Fourier backend
  double singular_gap = 1e-6;
};

PQForm harmonic_projection(const PQForm& psi, Which which = Which::Dbar, const SolverOptions& opt = {});
PQForm green(const PQForm& psi, Which which = Which::Dbar, const SolverOptions& opt = {});

// (box + sigma)^{-1} on the whole space. For sigma < 0 the harmonic part is
// divided by sigma and the orthogonal part is solved separately.
PQForm shifted_inverse(const PQForm& psi, double sigma, Which which = Which::Dbar, const SolverOptions& opt = {});

// Orthonormal basis of the kernel of box_dbar on (p,q)-forms.
std::vector<PQForm> harmonic_basis(const SpacePtr& space, int p, int q, const SolverOptions& opt = {});

// Smallest eigenvalue of box_dbar on (p,q)-forms (Fourier backend).
double min_eigenvalue(const SpacePtr& space, int p, int q, Which which = Which::Dbar);

}  // namespace hodgelab
