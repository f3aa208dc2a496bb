#include "tnsim/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tnsim/kernels.hpp"

namespace tnsim {

SpectralField::SpectralField(Grid grid) : grid_(std::move(grid)) {
  for (auto& c : comp_) c.assign(grid_.size(), Complex{});
}

CVec3 SpectralField::at(const Wavevector& k) const {
  if (!grid_.in_range(k)) throw std::out_of_range("wavevector outside the stored lattice");
  return at_index(grid_.index(k));
}

void SpectralField::set(const Wavevector& k, const CVec3& value) {
  if (!grid_.in_range(k)) throw std::out_of_range("wavevector outside the stored lattice");
  set_index(grid_.index(k), value);
}

void SpectralField::set_zero() {
  for (auto& c : comp_) std::fill(c.begin(), c.end(), Complex{});
}

void SpectralField::check_same_grid(const SpectralField& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("fields live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) { return axpy(1.0, other); }

SpectralField& SpectralField::operator-=(const SpectralField& other) { return axpy(-1.0, other); }

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : comp_) {
    for (auto& v : c) v *= s;
  }
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (auto& c : comp_) {
    for (auto& v : c) v *= s;
  }
  return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& x) {
  check_same_grid(x);
  const auto& k = kernels::active();
  for (int c = 0; c < 3; ++c) k.axpy_real(component(c), a, x.component(c), grid_.size());
  return *this;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp_) {
    for (const auto& v : c) m = std::max(m, std::abs(v));
  }
  return m;
}

double SpectralField::conjugate_asymmetry() const {
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const std::size_t j = grid_.index(-grid_.wavevector(i));
    for (const auto& c : comp_) worst = std::max(worst, std::abs(c[j] - std::conj(c[i])));
  }
  return worst / scale;
}

double SpectralField::divergence_residual() const {
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  const auto& t = grid_.tables();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (t.k2[i] == 0.0) continue;
    const CVec3 u = at_index(i);
    const double mag = std::sqrt(std::norm(u[0]) + std::norm(u[1]) + std::norm(u[2]));
    if (mag <= 1e-14 * scale) continue;
    const Complex dot = t.kx[i] * u[0] + t.ky[i] * u[1] + t.kz[i] * u[2];
    worst = std::max(worst, std::abs(dot) / (std::sqrt(t.k2[i]) * mag));
  }
  return worst;
}

double SpectralField::out_of_band_max() const {
  const auto& band = grid_.tables().band;
  double m = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (band[i] != 0.0) continue;
    for (const auto& c : comp_) m = std::max(m, std::abs(c[i]));
  }
  return m;
}

bool SpectralField::operator==(const SpectralField& other) const {
  return grid_ == other.grid_ && comp_ == other.comp_;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

Complex inner(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("fields live on different grids");
  Complex acc{};
  for (int c = 0; c < 3; ++c) {
    const Complex* a = f.component(c);
    const Complex* b = g.component(c);
    for (std::size_t i = 0; i < f.grid().size(); ++i) acc += a[i] * std::conj(b[i]);
  }
  return acc;
}

double l2_norm(const SpectralField& f) {
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Complex* a = f.component(c);
    for (std::size_t i = 0; i < f.grid().size(); ++i) acc += std::norm(a[i]);
  }
  return std::sqrt(acc);
}

}  // namespace tnsim
