#pragma once

// Brute-force reference computations shared by the unit tests and the
// acceptance binary. Deliberately naive: explicit mode loops, no FFTs, no
// kernel tables.

#include <map>
#include <vector>

#include "tnsim/noise.hpp"
#include "tnsim/spectral_ops.hpp"

namespace tnsim::oracle {

inline CVec3 leray(const Wavevector& m, const CVec3& u) {
  const auto n2 = static_cast<double>(norm2(m));
  if (n2 == 0.0) return u;
  const Complex d = (u[0] * double(m[0]) + u[1] * double(m[1]) + u[2] * double(m[2])) / n2;
  return {u[0] - d * double(m[0]), u[1] - d * double(m[1]), u[2] - d * double(m[2])};
}

/// P[div(v (x) v)] for a real field given by its positive-side modes: the
/// full support (each mode and its conjugate) is convolved pair by pair,
///   (div(v (x) v))^(m) = sum_{p + q = m} 2 pi i (m . v(p)) v(q).
inline std::map<Wavevector, CVec3> convolution(const std::vector<ModeAssignment>& modes) {
  std::vector<std::pair<Wavevector, CVec3>> support;
  for (const auto& [k, a] : modes) {
    support.emplace_back(k, a);
    if (k != Wavevector{0, 0, 0}) {
      support.emplace_back(-k, CVec3{std::conj(a[0]), std::conj(a[1]), std::conj(a[2])});
    }
  }
  std::map<Wavevector, CVec3> out;
  for (const auto& [p, vp] : support) {
    for (const auto& [q, vq] : support) {
      const Wavevector m = p + q;
      const Complex md = vp[0] * double(m[0]) + vp[1] * double(m[1]) + vp[2] * double(m[2]);
      const Complex f = Complex(0.0, kTwoPi) * md;
      CVec3& acc = out[m];
      for (int c = 0; c < 3; ++c) acc[c] += f * vq[c];
    }
  }
  for (auto& [m, u] : out) u = leray(m, u);
  return out;
}

/// P_theta at one input mode, applying B_k and then B_{-k} literally with
/// the same band truncation as the tabulated corrector.
inline CVec3 corrector(const Grid& g, const Wavevector& j, const CVec3& u,
                       const ThetaSpectrum& th, const NoiseBasis& basis, double mu) {
  CVec3 acc{};
  for (const auto& [k, t] : th.entries()) {
    const Wavevector m = j + k;
    if (!g.in_band(m)) continue;
    for (int alpha = 0; alpha < 2; ++alpha) {
      const Vec3& a = basis.frame(k, alpha);
      const Vec3& b = basis.frame(-k, alpha);
      const Complex f1(0.0, kTwoPi * (a[0] * j[0] + a[1] * j[1] + a[2] * j[2]));
      const CVec3 w1 = leray(m, {f1 * u[0], f1 * u[1], f1 * u[2]});
      const Complex f2(0.0, kTwoPi * (b[0] * m[0] + b[1] * m[1] + b[2] * m[2]));
      const CVec3 w2 = leray(j, {f2 * w1[0], f2 * w1[1], f2 * w1[2]});
      for (int c = 0; c < 3; ++c) acc[c] += 1.5 * mu * t * t * w2[c];
    }
  }
  return acc;
}

}  // namespace tnsim::oracle
