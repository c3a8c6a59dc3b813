#include "hodgelab/space.hpp"

#include "hodgelab/errors.hpp"

namespace hodgelab {

const char* backend_name(Backend b) { return b == Backend::Fourier ? "fourier" : "grid"; }

FieldSpace::FieldSpace(FiberChart fiber, BundleData bundle)
    : fiber_(std::move(fiber)), bundle_(std::move(bundle)) {
  chern_ = chern_data(bundle_, fiber_);
}

bool FieldSpace::flat() const {
  for (const auto& th : chern_.Theta)
    if (th.norm() != 0.0) return false;
  return true;
}

FourierSpace::FourierSpace(FiberChart fiber, BundleData bundle, int cutoff)
    : FieldSpace(std::move(fiber), std::move(bundle)), cutoff_(cutoff) {
  if (bundle_.kind == BundleKind::Automorphy)
    fail(ErrorCode::Unsupported, "automorphy bundles need the grid backend");
  ModeSet ms = mode_set(n(), cutoff);
  modes_ = ms.modes;
  zero_index_ = ms.zero_index;
  for (int c = 0; c < components(); ++c)
    symbols_.push_back(mode_symbols(fiber_, ms, bundle_.component_shift(c, n())));
}

FourierSpace::FourierSpace(const FourierSpace& parent, const std::vector<int>& mode_indices)
    : FieldSpace(parent.fiber_, parent.bundle_), cutoff_(parent.cutoff_) {
  symbols_.resize(parent.symbols_.size());
  for (int idx : mode_indices) {
    if (idx == parent.zero_index_) zero_index_ = static_cast<int>(modes_.size());
    modes_.push_back(parent.modes_[idx]);
    for (std::size_t c = 0; c < symbols_.size(); ++c) {
      symbols_[c].zeta.push_back(parent.symbols_[c].zeta[idx]);
      symbols_[c].zeta_bar.push_back(parent.symbols_[c].zeta_bar[idx]);
    }
  }
}

void FourierSpace::holo(int a, int comp, const cplx* in, cplx* out) const {
  const auto& z = symbols_[comp].zeta;
  for (std::size_t m = 0; m < modes_.size(); ++m) out[m] = z[m][a] * in[m];
}

void FourierSpace::antiholo(int b, int comp, const cplx* in, cplx* out) const {
  const auto& z = symbols_[comp].zeta_bar;
  for (std::size_t m = 0; m < modes_.size(); ++m) out[m] = z[m][b] * in[m];
}

cplx FourierSpace::integrate(const cplx* a, const cplx* b) const {
  cplx s = 0.0;
  for (std::size_t m = 0; m < modes_.size(); ++m) s += a[m] * std::conj(b[m]);
  return s * fiber_.volume();
}

void FourierSpace::fill_constant(cplx c, cplx* out) const {
  for (std::size_t m = 0; m < modes_.size(); ++m) out[m] = 0.0;
  if (zero_index_ < 0) fail(ErrorCode::Precondition, "space has no zero mode");
  out[zero_index_] = c;
}

cplx FourierSpace::constant_part(const cplx* a) const { return zero_index_ < 0 ? cplx(0.0) : a[zero_index_]; }

cplx FourierSpace::evaluate(const cplx* field, const RVec& point) const {
  cplx s = 0.0;
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    double phase = 2.0 * kPi * modes_[m].cast<double>().dot(point);
    s += field[m] * std::exp(kI * phase);
  }
  return s;
}

GridSpace::GridSpace(FiberChart fiber, BundleData bundle, int N) : FieldSpace(std::move(fiber), std::move(bundle)) {
  if (n() != 1) fail(ErrorCode::Unsupported, "grid backend is implemented for n = 1");
  if (N < 8) fail(ErrorCode::Precondition, "grid resolution must be at least 8");
  if (components() != 1) fail(ErrorCode::Unsupported, "grid backend holds rank-one bundles");
  grid_.N = N;
  degree_ = bundle_.kind == BundleKind::Automorphy ? bundle_.degree : 0;
  grid_.degree = degree_;
  chi_ = bundle_.component_shift(0, 1);
  wrap_up_.resize(N);
  wrap_down_.resize(N);
  for (int i = 0; i < N; ++i) {
    wrap_up_[i] = std::exp(-2.0 * kPi * kI * (degree_ * x(i)));
    wrap_down_[i] = std::conj(wrap_up_[i]);
  }
}

namespace {
constexpr double kC1 = 8.0 / 12.0;
constexpr double kC2 = 1.0 / 12.0;
}  // namespace

void GridSpace::nabla_x(const cplx* in, cplx* out) const {
  const int N = grid_.N;
  const double inv_h = N;
  for (int j = 0; j < N; ++j) {
    const cplx shift = 2.0 * kPi * kI * (chi_[0] + degree_ * y(j));
    const cplx* row = in + static_cast<std::size_t>(j) * N;
    cplx* orow = out + static_cast<std::size_t>(j) * N;
    for (int i = 0; i < N; ++i) {
      const int ip1 = (i + 1) % N, ip2 = (i + 2) % N;
      const int im1 = (i - 1 + N) % N, im2 = (i - 2 + N) % N;
      orow[i] = (kC1 * (row[ip1] - row[im1]) - kC2 * (row[ip2] - row[im2])) * inv_h + shift * row[i];
    }
  }
}

void GridSpace::nabla_y(const cplx* in, cplx* out) const {
  const int N = grid_.N;
  const double inv_h = N;
  const cplx shift = 2.0 * kPi * kI * chi_[1];
  auto at = [&](int i, int j) -> cplx {
    if (j >= N) return wrap_up_[i] * in[grid_.index(i, j - N)];
    if (j < 0) return wrap_down_[i] * in[grid_.index(i, j + N)];
    return in[grid_.index(i, j)];
  };
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      out[grid_.index(i, j)] =
          (kC1 * (at(i, j + 1) - at(i, j - 1)) - kC2 * (at(i, j + 2) - at(i, j - 2))) * inv_h + shift * at(i, j);
}

void GridSpace::holo(int, int, const cplx* in, cplx* out) const {
  const std::size_t P = points();
  std::vector<cplx> dx(P), dy(P);
  nabla_x(in, dx.data());
  nabla_y(in, dy.data());
  const cplx tau = fiber_.tau()(0, 0);
  const cplx inv = 1.0 / fiber_.delta(0, 0);
  for (std::size_t k = 0; k < P; ++k) out[k] = (dy[k] - std::conj(tau) * dx[k]) * inv;
}

void GridSpace::antiholo(int, int, const cplx* in, cplx* out) const {
  const std::size_t P = points();
  std::vector<cplx> dx(P), dy(P);
  nabla_x(in, dx.data());
  nabla_y(in, dy.data());
  const cplx tau = fiber_.tau()(0, 0);
  const cplx inv = 1.0 / fiber_.delta(0, 0);
  for (std::size_t k = 0; k < P; ++k) out[k] = (tau * dx[k] - dy[k]) * inv;
}

cplx GridSpace::integrate(const cplx* a, const cplx* b) const {
  cplx s = 0.0;
  const std::size_t P = points();
  for (std::size_t k = 0; k < P; ++k) s += a[k] * std::conj(b[k]);
  return s * (fiber_.volume() / static_cast<double>(P));
}

void GridSpace::fill_constant(cplx c, cplx* out) const {
  if (degree_ != 0) fail(ErrorCode::Precondition, "constant sections need a degree-zero bundle");
  std::fill(out, out + points(), c);
}

cplx GridSpace::constant_part(const cplx* a) const {
  cplx s = 0.0;
  const std::size_t P = points();
  for (std::size_t k = 0; k < P; ++k) s += a[k];
  return s / static_cast<double>(P);
}

SpacePtr make_fourier_space(const FiberChart& fiber, const BundleData& bundle, int cutoff) {
  return std::make_shared<FourierSpace>(fiber, bundle, cutoff);
}

SpacePtr make_grid_space(const FiberChart& fiber, const BundleData& bundle, int N) {
  return std::make_shared<GridSpace>(fiber, bundle, N);
}

}  // namespace hodgelab
