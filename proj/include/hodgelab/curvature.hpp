#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hodgelab/frames.hpp"

namespace hodgelab {

struct CurvatureReport {
  std::string evaluator;
  int p = 0;
  int q = 0;
  CMat value;                                       // value(k, l) = R(d_s, d_sbar, psi_k, conj psi_l)
  std::vector<std::pair<std::string, CMat>> terms;  // signed contributions, summing to value
  CMat gram;
  std::vector<std::pair<std::string, double>> diagnostics;

  // R / |psi|^2 for rank-1 frames.
  double normalized() const;
  double bookkeeping_defect() const;
  double hermitian_defect() const;
};

// Five-term pairing for <L_[v,vbar] chi, psi>.
cplx lie_commutator_pairing(const HorizontalData& hd, const PQForm& chi, const PQForm& psi);

// w_s and w_sbar of a fiberwise harmonic form.
PQForm w_s(const HorizontalData& hd, const PQForm& psi);
PQForm w_sbar(const HorizontalData& hd, const PQForm& psi);
// [Lambda, i eta_sbar] psi
PQForm lambda_eta_commutator(const HorizontalData& hd, const PQForm& psi);

CurvatureReport curvature_main(const HorizontalData& hd, const HarmonicFrame& frame, const SolverOptions& opt = {});
CurvatureReport curvature_griffiths(const HorizontalData& hd, const HarmonicFrame& frame, const SolverOptions& opt = {});

struct LineOptions {
  double shift = 1.0;  // (box + shift)^{-1} in the p0 formula
  double leak_tolerance = 1e-6;
};
CurvatureReport curvature_line_p0(const HorizontalData& hd, const HarmonicFrame& frame, const LineOptions& lopt = {},
                                  const SolverOptions& opt = {});
CurvatureReport curvature_line_nq(const HorizontalData& hd, const HarmonicFrame& frame, const SolverOptions& opt = {});

struct FlatOptions {
  const PQForm* eta_override = nullptr;  // End-valued (0,1) form replacing eta_s in the parallel check
  double parallel_tolerance = 1e-10;
};
CurvatureReport curvature_flat(const HorizontalData& hd, const HarmonicFrame& frame, const FlatOptions& fopt = {},
                               const SolverOptions& opt = {});
CurvatureReport curvature_he(const HorizontalData& hd, const HarmonicFrame& frame, const SolverOptions& opt = {});

struct WPReport {
  double norm_direct = 0.0;
  double norm_lambda = 0.0;
  double curv_wp = 0.0;
  std::vector<std::pair<std::string, double>> curv_wp_terms;
  std::vector<double> curvflat;          // q = 1..n
  std::vector<double> harmonic_defect;   // |box eta^q| / max(1, |eta^q|), q = 1..n, plus eta^2 at index 1
  double eta2_harmonic_defect = 0.0;
  std::vector<double> he_drop;           // <[H(Theta_ss), eta^q], eta^q>, q = 1..n
  double sectional = 0.0;                // 2 <G(i Lambda[eta_sbar, eta_s]), same>
  bool semipositive = true;
};
WPReport wp_suite(const HorizontalData& hd, const SolverOptions& opt = {});

// Evaluators applicable to a family and bidegree, by name.
std::vector<std::string> applicable_evaluators(const HorizontalData& hd, int p, int q);
CurvatureReport evaluate(const std::string& name, const HorizontalData& hd, const HarmonicFrame& frame,
                         const SolverOptions& opt = {});

}  // namespace hodgelab
