#pragma once

// Kraichnan-type transport noise on the torus.
//
// sigma_{k,a}(x) = a_{k,a} exp(2 pi i k.x) for k != 0, a in {0, 1}, where
// {a_{k,0}, a_{k,1}} is an orthonormal frame of k-perp shared by k and -k.
// The driving family is W^{k,a} = B^{k,a} + i B^{-k,a} for k in the positive
// half-lattice and W^{-k,a} = conj(W^{k,a}), with B real standard Brownian
// motions, so E|dW|^2 = 2 dt and E[dW dW] = 0.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tnsim/fft.hpp"
#include "tnsim/spectral_ops.hpp"

namespace tnsim {

/// Lexicographic positive half-lattice: k1 > 0, or k1 = 0 and k2 > 0, or
/// k1 = k2 = 0 and k3 > 0.
bool in_positive_half(const Wavevector& k);

class NoiseBasis {
 public:
  /// Frames for every 0 < |k|_inf <= kmax. e is the lowest-index axis
  /// vector not parallel to k, a_0 = k x e / |k x e|, a_1 = k x a_0 / |..|;
  /// negative modes copy the frame of their positive partner.
  static NoiseBasis build(int kmax);

  int kmax() const { return kmax_; }
  bool contains(const Wavevector& k) const;
  const Vec3& frame(const Wavevector& k, int alpha) const;

  /// Same lattice, every frame rotated by `angle` inside k-perp. Used to
  /// check that frame-independent quantities really are.
  NoiseBasis rotated(double angle) const;

 private:
  NoiseBasis() = default;
  std::size_t slot(const Wavevector& k) const;

  int kmax_ = 0;
  std::shared_ptr<std::vector<std::array<Vec3, 2>>> frames_;
};

struct ThetaEntry {
  Wavevector k;
  double theta;
};

/// Nonnegative weights theta_k on a finite support that is symmetric under
/// k -> -k with theta_{-k} = theta_k.
class ThetaSpectrum {
 public:
  ThetaSpectrum() = default;

  /// Theta_k = |k|^{-alpha_decay} on n <= |k| <= 2n (Euclidean), normalised
  /// in l2.
  static ThetaSpectrum shell(int n, double alpha_decay);
  /// Arbitrary spectrum; flags are computed, not asserted.
  static ThetaSpectrum from_entries(std::vector<ThetaEntry> entries);

  const std::vector<ThetaEntry>& entries() const { return entries_; }
  /// The positive-half members, in lexicographic order. This order is the
  /// canonical order of Brownian increments.
  const std::vector<ThetaEntry>& positive() const { return positive_; }
  bool empty() const { return entries_.empty(); }

  bool normalized() const { return normalized_; }
  bool radially_symmetric() const { return radial_; }
  double l2() const;
  double linf() const;
  /// Largest |k|_inf in the support (0 when empty).
  int max_component() const;
  /// Largest Euclidean |k| in the support.
  double max_norm() const;

  std::optional<int> shell_n() const { return shell_n_; }
  std::optional<double> alpha_decay() const { return alpha_decay_; }

  nlohmann::json to_json() const;
  static ThetaSpectrum from_json(const nlohmann::json& j);

 private:
  std::vector<ThetaEntry> entries_;
  std::vector<ThetaEntry> positive_;
  bool normalized_ = false;
  bool radial_ = false;
  std::optional<int> shell_n_;
  std::optional<double> alpha_decay_;
};

/// Complex increments dW^{k,a} over one step for the positive support modes
/// of a spectrum, in ThetaSpectrum::positive() order.
struct NoiseIncrements {
  std::vector<std::array<Complex, 2>> dw;
};

/// Counter-addressed source of the real increments B^{k,a}. The stream for
/// (seed, sample, step) is an mt19937_64 seeded through std::seed_seq; within
/// it, for each positive mode in canonical order and each a, the increment
/// of B^{k,a} is drawn and then that of B^{-k,a}, each N(0, dt).
class BrownianDriver {
 public:
  BrownianDriver(std::uint64_t seed, std::size_t positive_modes);

  std::uint64_t seed() const { return seed_; }
  std::size_t modes() const { return modes_; }

  NoiseIncrements increments(std::uint64_t sample, std::uint64_t step, double dt) const;
  /// Random access to one dW^{k,a}; `mode` indexes ThetaSpectrum::positive().
  Complex increment(std::uint64_t sample, std::uint64_t step, std::size_t mode, int alpha,
                    double dt) const;

 private:
  std::uint64_t seed_;
  std::size_t modes_;
};

/// P[(sigma_{k,a} . grad) v] for one k (either half). Input mode j feeds
/// output mode j + k with 2 pi i (a . j) u_hat(j), projected there. Output
/// modes outside the dealias band are dropped. The result is complex-valued.
SpectralField transport_mode_apply(const SpectralField& v, const Wavevector& k, int alpha,
                                   const NoiseBasis& basis);

/// The real random velocity dX = sum_{k, a} theta_k sigma_{k,a} dW^{k,a}
/// over the whole support (positive and negative halves).
SpectralField noise_velocity_field(const Grid& grid, const ThetaSpectrum& theta,
                                   const NoiseBasis& basis, const NoiseIncrements& inc);

/// P[div(v (x) c)] on the dealias band, i.e. P[(c . grad) v] for
/// divergence-free c, by physical-space products.
SpectralField transport_by(const SpectralField& v, const SpectralField& carrier, FftEngine& fft);

enum class NoisePath { oracle, fast };

/// sqrt(3 mu / 2) sum_{k, a} theta_k P[(sigma_{k,a} . grad) v] dW^{k,a}.
/// The oracle path sums transport_mode_apply over the support; the fast path
/// builds dX and forms one pseudo-spectral product.
SpectralField noise_increment_field(const SpectralField& v, const ThetaSpectrum& theta,
                                    const NoiseBasis& basis, const NoiseIncrements& inc,
                                    double mu, NoisePath path = NoisePath::fast,
                                    FftEngine* fft = nullptr);

/// The Ito-Stratonovich corrector P_theta, tabulated as one real symmetric
/// 3x3 matrix per band mode:
///   M(j) = -(3 mu / 2)(2 pi)^2 sum_{k, a} theta_k^2 (a_{k,a} . j)^2 P_j P_{j+k} P_j,
/// where terms with j + k outside the band are dropped, matching the
/// truncation of transport_mode_apply.
class Corrector {
 public:
  Corrector(const Grid& grid, const ThetaSpectrum& theta, const NoiseBasis& basis, double mu);

  const Grid& grid() const { return grid_; }
  double mu() const { return mu_; }

  SpectralField apply(const SpectralField& v) const;
  /// this -> y += a * P_theta v
  void accumulate(SpectralField& y, double a, const SpectralField& v) const;
  /// Largest |eigenvalue| of M(j) over the band; the explicit step is
  /// stable for dt * spectral_radius() of order one.
  double spectral_radius() const { return radius_; }

 private:
  Grid grid_;
  double mu_;
  std::shared_ptr<const std::array<std::vector<double>, 6>> table_;
  double radius_ = 0.0;
};

/// Symbol of P_theta at mode j. With `band` set, terms with j + k outside
/// that grid's band are dropped; otherwise the lattice sum is complete.
CMat3 corrector_symbol(const Wavevector& j, const ThetaSpectrum& theta, const NoiseBasis& basis,
                       double mu, const Grid* band = nullptr);

SpectralField corrector_apply(const SpectralField& v, const ThetaSpectrum& theta,
                              const NoiseBasis& basis, double mu);

/// ||P_{theta^n} phi - (3 mu / 5) Delta phi|| / ||(3 mu / 5) Delta phi|| for the
/// real single-mode field phi built from (j, a), with Delta of symbol
/// -(2 pi)^2 |j|^2 and the untruncated shell sum.
double corrector_limit_error(const Wavevector& j, const CVec3& a, int n, double alpha_decay,
                             double mu);

struct CovariancePair {
  Wavevector k;            // positive member
  double trace_complex;    // tr Cov of the complex-formulation increment
  double trace_real;       // tr Cov of the real xi-formulation increment
  double ratio;            // trace_real / trace_complex (1 when both vanish)
  double probe_mismatch;   // max relative |<C_c z, z> - <C_r z, z>| over probes
};

struct CovarianceReport {
  std::vector<CovariancePair> pairs;
  double common_ratio = 1.0;   // ratio of the summed traces
  double max_deviation = 0.0;  // max |ratio - common_ratio| and probe mismatch
  bool mismatch = false;       // max_deviation > 1e-10
};

/// Compares, pair by pair {k, -k}, the one-step covariance of
/// theta_k sum_a P[(sigma . grad) v] dW (complex family) with that of
/// theta_k sum_a P[(xi . grad) v] dB over xi = 2 Re sigma, 2 Im sigma (real
/// family), per unit dt. The complex side uses the moments of dW, the real
/// side builds xi explicitly and transports pseudo-spectrally.
CovarianceReport real_noise_covariance_check(const ThetaSpectrum& theta, const NoiseBasis& basis,
                                             const SpectralField& v, int probes = 4,
                                             std::uint64_t probe_seed = 1);

}  // namespace tnsim
