#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace hodgelab {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Complex torus C^n / (Z^n + tau Z^n), realized on the fixed real torus [0,1)^{2n}.
struct Lattice {
  int n = 1;
  CMat tau;
};

// Real coordinates (x, y) with z = x + tau y and a constant Kaehler metric g_{a bbar}.
struct FiberChart {
  Lattice lattice;
  CMat g;      // g(a, b) = g_{a bbar}
  CMat g_inv;  // g_inv(b, a) = g^{bbar a}
  CMat delta;  // tau - conj(tau)
  CMat delta_inv;

  int n() const { return lattice.n; }
  const CMat& tau() const { return lattice.tau; }
  // Integral of omega^n / n! over the fiber.
  double volume() const;
  // Lebesgue measure of a fundamental domain in C^n = R^{2n}.
  double euclidean_covolume() const;

  // Symbols of D_a and Dbar_b acting on exp(2 pi i (f_x . x + f_y . y)).
  CVec zeta(const RVec& freq) const;
  CVec zeta_bar(const RVec& freq) const;
};

FiberChart build_fiber(const Lattice& lattice, const CMat& metric);

// Unit-volume flat metric g = (Im tau)^{-1} / 2.
CMat unit_volume_metric(const CMat& tau);

struct ModeSet {
  int n = 1;
  int cutoff = 1;
  std::vector<Eigen::VectorXi> modes;  // k in Z^{2n}, lexicographic
  int zero_index = -1;

  std::size_t size() const { return modes.size(); }
  int index_of(const Eigen::VectorXi& k) const;
};

ModeSet mode_set(int n, int cutoff);

// Frequency covectors for a mode set with a character shift.
struct ModeSymbols {
  std::vector<CVec> zeta;
  std::vector<CVec> zeta_bar;
};

ModeSymbols mode_symbols(const FiberChart& fiber, const ModeSet& modes, const RVec& shift);

// Periodic grid for degree-d quasi-periodic sections on a one-dimensional fiber.
struct QuasiGrid {
  int N = 64;
  int degree = 0;
  double h() const { return 1.0 / N; }
  std::size_t size() const { return static_cast<std::size_t>(N) * N; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * N + i; }
};

// Real character vector chi with zeta_bar(chi) = c, i.e. the (0,1)-part of 2 pi i chi.(dx, dy) is c.
RVec character_from_dbar_shift(const FiberChart& fiber, const CVec& c);

}  // namespace hodgelab
