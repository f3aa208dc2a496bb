#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace tnsim {

using Complex = std::complex<double>;
using Wavevector = std::array<int, 3>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<Complex, 3>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline Wavevector operator-(const Wavevector& k) { return {-k[0], -k[1], -k[2]}; }
inline Wavevector operator+(const Wavevector& a, const Wavevector& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline long norm2(const Wavevector& k) {
  return static_cast<long>(k[0]) * k[0] + static_cast<long>(k[1]) * k[1] +
         static_cast<long>(k[2]) * k[2];
}
int max_norm(const Wavevector& k);

/// Discretisation of the unit periodic box [0,1]^3.
///
/// Coefficients are stored on the dense cube of wavevectors with
/// |k_i| <= N/2 (N+1 values per axis). The dealias band is the max-norm
/// ball |k|_inf <= K with K = floor((N-1)/3), which keeps quadratic products
/// of band-limited fields alias-free on the band.
///
/// Per-mode tables (k components, |k|^2, 1/|k|^2, band mask) are built once
/// and shared between copies.
class Grid {
 public:
  struct Tables {
    std::vector<double> kx, ky, kz, k2, inv_k2, band;
  };

  explicit Grid(int n);

  int n() const { return n_; }
  int half() const { return n_ / 2; }
  int cutoff() const { return cutoff_; }
  int extent() const { return n_ + 1; }
  std::size_t size() const { return size_; }
  std::size_t physical_size() const {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }

  bool in_range(const Wavevector& k) const;
  bool in_band(const Wavevector& k) const { return max_norm(k) <= cutoff_; }

  std::size_t index(const Wavevector& k) const {
    const auto e = static_cast<std::size_t>(extent());
    const auto h = half();
    return (static_cast<std::size_t>(k[0] + h) * e + static_cast<std::size_t>(k[1] + h)) * e +
           static_cast<std::size_t>(k[2] + h);
  }
  Wavevector wavevector(std::size_t idx) const;

  const Tables& tables() const { return *tables_; }

  /// Indices of every mode inside the dealias band, in storage order.
  const std::vector<std::size_t>& band_indices() const { return *band_; }

  friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_; }

 private:
  int n_;
  int cutoff_;
  std::size_t size_;
  std::shared_ptr<const Tables> tables_;
  std::shared_ptr<const std::vector<std::size_t>> band_;
};

}  // namespace tnsim
