#pragma once

#include <array>
#include <vector>

#include "tnsim/grid.hpp"

namespace tnsim {

/// A 3-component vector field on the torus held as Fourier coefficients
/// u_hat(k) on the dense cube |k_i| <= N/2, one contiguous array per
/// component. Coefficients follow u(x) = sum_k u_hat(k) exp(2 pi i k.x).
///
/// Real fields satisfy u_hat(-k) = conj(u_hat(k)). The type does not
/// enforce this, since single noise-mode contributions are complex-valued;
/// operations that need realness check it.
class SpectralField {
 public:
  explicit SpectralField(Grid grid);

  const Grid& grid() const { return grid_; }

  Complex* component(int c) { return comp_[static_cast<std::size_t>(c)].data(); }
  const Complex* component(int c) const { return comp_[static_cast<std::size_t>(c)].data(); }

  CVec3 at(const Wavevector& k) const;
  CVec3 at_index(std::size_t i) const {
    return {comp_[0][i], comp_[1][i], comp_[2][i]};
  }
  void set(const Wavevector& k, const CVec3& value);
  void set_index(std::size_t i, const CVec3& value) {
    comp_[0][i] = value[0];
    comp_[1][i] = value[1];
    comp_[2][i] = value[2];
  }

  void set_zero();

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  SpectralField& operator*=(Complex s);
  /// this += a * x
  SpectralField& axpy(double a, const SpectralField& x);

  /// Largest |u_hat(-k) - conj(u_hat(k))| over all k, relative to the
  /// largest coefficient magnitude (0 for the zero field).
  double conjugate_asymmetry() const;
  double max_abs() const;
  /// Largest |k . u_hat(k)| / (|k| |u_hat(k)|) over nonzero k and
  /// non-negligible coefficients.
  double divergence_residual() const;
  /// Largest coefficient magnitude outside the dealias band.
  double out_of_band_max() const;

  bool operator==(const SpectralField& other) const;

 private:
  void check_same_grid(const SpectralField& other) const;

  Grid grid_;
  std::array<std::vector<Complex>, 3> comp_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Hermitian L2(T^3) inner product, sum_k f_hat(k) . conj(g_hat(k)).
Complex inner(const SpectralField& f, const SpectralField& g);
double l2_norm(const SpectralField& f);

}  // namespace tnsim
