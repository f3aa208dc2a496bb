#pragma once

#include <memory>
#include <vector>

#include "tnsim/spectral_field.hpp"

namespace tnsim {

/// Moves fields between coefficient storage and physical point values on
/// the N^3 grid x = (i, j, l) / N. Backed by FFTW r2c/c2r plans; each
/// engine owns its scratch buffers, so use one engine per worker.
///
/// to_physical evaluates u(x) = sum_k u_hat(k) exp(2 pi i k.x) and
/// from_physical is its inverse (normalised by N^3). Modes with some
/// |k_i| = N/2 are not representable on the grid and are dropped in both
/// directions; all simulated fields are band-limited well inside that.
class FftEngine {
 public:
  enum class Extent { band, full };

  explicit FftEngine(const Grid& grid);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  const Grid& grid() const { return grid_; }

  /// One component; out has physical_size() entries, index (i*N + j)*N + l.
  /// Assumes conjugate symmetry; only k_z >= 0 coefficients are read.
  void to_physical(const Complex* coeffs, double* out, Extent extent = Extent::band);
  /// One component; coefficients outside the extent are left untouched.
  void from_physical(const double* in, Complex* coeffs, Extent extent = Extent::band);

  std::vector<double> to_physical(const SpectralField& f, int component,
                                  Extent extent = Extent::full);

  /// Evaluates the field with a complex-to-complex transform (no symmetry
  /// assumed) and returns max |Im u(x)| / max |u(x)| over grid points and
  /// components; 0 for the zero field.
  double physical_imag_ratio(const SpectralField& f);

 private:
  // Index pairs (coefficient storage, r2c half-spectrum). Scatter covers
  // every k_z >= 0 mode; gather reads the half-lattice directly and fills
  // its mirror by conjugation, so transformed fields are exactly Hermitian.
  struct Map {
    std::vector<std::size_t> scatter_dense, scatter_packed;
    std::vector<std::size_t> direct_dense, direct_packed;
    std::vector<std::size_t> mirror_dense, mirror_packed;
  };
  const Map& map(Extent extent) const { return extent == Extent::band ? band_ : full_; }
  Map build_map(bool band_only) const;

  struct Impl;
  Grid grid_;
  Map band_, full_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tnsim
