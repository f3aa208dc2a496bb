#pragma once

// Linear Fourier-multiplier operators and norms on SpectralField.
//
// Convention: derivatives carry the factor 2*pi*i (grad exp(2 pi i k.x) =
// 2 pi i k exp(2 pi i k.x)), while the fractional Laplacian uses the bare
// symbol |k|^{2 gamma}. The operator -Delta obtained as gamma = 1 of
// fractional_laplacian therefore differs from -div grad by (2 pi)^2;
// laplacian() below is the 2*pi-consistent one (symbol -(2 pi)^2 |k|^2).

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "tnsim/spectral_field.hpp"

namespace tnsim {

using CMat3 = std::array<std::array<Complex, 3>, 3>;

/// Mode-diagonal operator u_hat(k) -> symbol(k) u_hat(k).
class MultiplierOp {
 public:
  using Symbol = std::function<CMat3(const Wavevector&)>;

  explicit MultiplierOp(Symbol symbol) : symbol_(std::move(symbol)) {}
  static MultiplierOp scalar(std::function<Complex(const Wavevector&)> s);

  SpectralField apply(const SpectralField& f) const;
  CMat3 symbol(const Wavevector& k) const { return symbol_(k); }

 private:
  Symbol symbol_;
};

struct ModeAssignment {
  Wavevector k;
  CVec3 amplitude;
};

/// Builds the real field with u_hat(k) = a and u_hat(-k) = conj(a) for each
/// listed mode. A k = 0 amplitude must be real.
SpectralField field_from_modes(const Grid& grid, std::span<const ModeAssignment> modes);

SpectralField helmholtz_project(SpectralField f);
/// Q = I - P, the gradient part.
SpectralField gradient_part(const SpectralField& f);

SpectralField fractional_laplacian(SpectralField f, double gamma);
/// Delta with the 2*pi convention: symbol -(2 pi)^2 |k|^2.
SpectralField laplacian(SpectralField f);

/// (w . grad) f, symbol 2 pi i (w . k).
SpectralField constant_drift(const SpectralField& f, const Vec3& w);

SpectralField dealias(SpectralField f);

Vec3 mean(const SpectralField& f);
SpectralField subtract_mean(SpectralField f);

/// Weights (1 + |k|^2)^s over the grid storage.
std::vector<double> sobolev_weights(const Grid& grid, double s);
/// sqrt(sum_k w(k) |u_hat(k)|^2).
double weighted_norm(const SpectralField& f, std::span<const double> weights);
double sobolev_norm(const SpectralField& f, double s);

/// Littlewood-Paley block of a wavevector: 0 for |k| <= 1, otherwise
/// floor(log2 |k|) + 1, i.e. block j >= 1 holds 2^{j-1} <= |k| < 2^j.
int dyadic_block(const Wavevector& k);

/// (sum_j 2^{j s p} ||Delta_j f||_2^p)^{1/p} with sharp dyadic blocks. This is
/// one fixed member of the family of norms equivalent to B^s_{2,p}; only
/// two-sided comparability with the interpolation norm holds.
double besov_norm(const SpectralField& f, double s, double p);

struct RandomFieldOptions {
  double k_min = 1.0;   ///< Euclidean |k| lower bound (inclusive)
  double k_max = 4.0;   ///< Euclidean |k| upper bound (inclusive), clipped to the band
  double slope = 0.0;   ///< amplitudes scale like |k|^-slope
  double l2 = 1.0;      ///< target L2 norm of the result
  std::uint64_t seed = 1;
};

/// Divergence-free, mean-zero, real, band-limited random field.
SpectralField random_divergence_free(const Grid& grid, const RandomFieldOptions& options);

}  // namespace tnsim
