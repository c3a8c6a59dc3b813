#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hodgelab/bundles.hpp"
#include "hodgelab/torus.hpp"

namespace hodgelab {

enum class Backend { Fourier, Grid };

const char* backend_name(Backend b);

// Discretized sections of a bundle over one fiber. A field is an array of
// points() complex values: Fourier coefficients or grid samples in the unitary frame.
class FieldSpace {
public:
  FieldSpace(FiberChart fiber, BundleData bundle);
  virtual ~FieldSpace() = default;

  virtual Backend backend() const = 0;
  virtual std::size_t points() const = 0;

  // out = nabla_a in, out = nabla_bbar in (covariant, component comp)
  virtual void holo(int a, int comp, const cplx* in, cplx* out) const = 0;
  virtual void antiholo(int b, int comp, const cplx* in, cplx* out) const = 0;

  // Integral of a conj(b) against omega^n / n!.
  virtual cplx integrate(const cplx* a, const cplx* b) const = 0;

  virtual void fill_constant(cplx c, cplx* out) const = 0;
  // Constant part of a field (zero mode / grid mean).
  virtual cplx constant_part(const cplx* a) const = 0;

  int n() const { return fiber_.n(); }
  int components() const { return bundle_.components(); }
  const FiberChart& fiber() const { return fiber_; }
  const BundleData& bundle() const { return bundle_; }
  const ChernData& chern() const { return chern_; }
  const CMat& curvature(int comp) const { return chern_.Theta[comp]; }
  bool flat() const;

  // Per-space memo for expensive derived data (spectral blocks, harmonic bases).
  template <class T>
  std::shared_ptr<const T> memo(const std::string& key, const std::function<std::shared_ptr<const T>()>& build) const {
    {
      std::lock_guard<std::mutex> lock(memo_mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return std::static_pointer_cast<const T>(it->second);
    }
    auto value = build();
    std::lock_guard<std::mutex> lock(memo_mu_);
    memo_.emplace(key, value);
    return value;
  }

protected:
  FiberChart fiber_;
  BundleData bundle_;
  ChernData chern_;

private:
  mutable std::mutex memo_mu_;
  mutable std::map<std::string, std::shared_ptr<const void>> memo_;
};

using SpacePtr = std::shared_ptr<const FieldSpace>;

class FourierSpace : public FieldSpace {
public:
  FourierSpace(FiberChart fiber, BundleData bundle, int cutoff);
  // Space holding only the listed modes of a parent space.
  FourierSpace(const FourierSpace& parent, const std::vector<int>& mode_indices);

  Backend backend() const override { return Backend::Fourier; }
  std::size_t points() const override { return modes_.size(); }
  void holo(int a, int comp, const cplx* in, cplx* out) const override;
  void antiholo(int b, int comp, const cplx* in, cplx* out) const override;
  cplx integrate(const cplx* a, const cplx* b) const override;
  void fill_constant(cplx c, cplx* out) const override;
  cplx constant_part(const cplx* a) const override;

  int cutoff() const { return cutoff_; }
  const std::vector<Eigen::VectorXi>& modes() const { return modes_; }
  int zero_index() const { return zero_index_; }
  const CVec& zeta(int comp, std::size_t m) const { return symbols_[comp].zeta[m]; }
  const CVec& zeta_bar(int comp, std::size_t m) const { return symbols_[comp].zeta_bar[m]; }

  // Field value at a real point (x, y) in [0,1)^{2n}.
  cplx evaluate(const cplx* field, const RVec& point) const;

private:
  int cutoff_ = 1;
  std::vector<Eigen::VectorXi> modes_;
  int zero_index_ = -1;
  std::vector<ModeSymbols> symbols_;
};

// Fourth-order finite differences on an N x N grid over a one-dimensional fiber.
class GridSpace : public FieldSpace {
public:
  GridSpace(FiberChart fiber, BundleData bundle, int N);

  Backend backend() const override { return Backend::Grid; }
  std::size_t points() const override { return grid_.size(); }
  void holo(int a, int comp, const cplx* in, cplx* out) const override;
  void antiholo(int b, int comp, const cplx* in, cplx* out) const override;
  cplx integrate(const cplx* a, const cplx* b) const override;
  void fill_constant(cplx c, cplx* out) const override;
  cplx constant_part(const cplx* a) const override;

  const QuasiGrid& grid() const { return grid_; }
  int degree() const { return degree_; }
  double x(int i) const { return static_cast<double>(i) / grid_.N; }
  double y(int j) const { return static_cast<double>(j) / grid_.N; }

  void nabla_x(const cplx* in, cplx* out) const;
  void nabla_y(const cplx* in, cplx* out) const;

private:
  QuasiGrid grid_;
  int degree_ = 0;
  RVec chi_;
  std::vector<cplx> wrap_up_;    // phase for y + 1 at column i
  std::vector<cplx> wrap_down_;  // phase for y - 1 at column i
};

SpacePtr make_fourier_space(const FiberChart& fiber, const BundleData& bundle, int cutoff);
SpacePtr make_grid_space(const FiberChart& fiber, const BundleData& bundle, int N);

}  // namespace hodgelab
