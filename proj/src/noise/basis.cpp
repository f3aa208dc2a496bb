#include <cmath>
#include <stdexcept>
#include <string>

#include "tnsim/noise.hpp"

namespace tnsim {
namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 normalized(const Vec3& a) {
  const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  return {a[0] / n, a[1] / n, a[2] / n};
}

}  // namespace

bool in_positive_half(const Wavevector& k) {
  return k[0] > 0 || (k[0] == 0 && (k[1] > 0 || (k[1] == 0 && k[2] > 0)));
}

NoiseBasis NoiseBasis::build(int kmax) {
  if (kmax < 1) throw std::invalid_argument("noise basis needs kmax >= 1, got " + std::to_string(kmax));
  NoiseBasis b;
  b.kmax_ = kmax;
  const auto e = static_cast<std::size_t>(2 * kmax + 1);
  b.frames_ = std::make_shared<std::vector<std::array<Vec3, 2>>>(e * e * e);
  auto& frames = *b.frames_;
  for (int x = -kmax; x <= kmax; ++x) {
    for (int y = -kmax; y <= kmax; ++y) {
      for (int z = -kmax; z <= kmax; ++z) {
        const Wavevector k{x, y, z};
        if (!in_positive_half(k)) continue;
        const Vec3 kv{double(x), double(y), double(z)};
        // e_1 unless k lies on the first axis.
        const Vec3 axis = (y == 0 && z == 0) ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
        const Vec3 a0 = normalized(cross(kv, axis));
        const Vec3 a1 = normalized(cross(kv, a0));
        frames[b.slot(k)] = {a0, a1};
        frames[b.slot(-k)] = {a0, a1};
      }
    }
  }
  return b;
}

bool NoiseBasis::contains(const Wavevector& k) const {
  const int m = max_norm(k);
  return m > 0 && m <= kmax_;
}

std::size_t NoiseBasis::slot(const Wavevector& k) const {
  const auto e = static_cast<std::size_t>(2 * kmax_ + 1);
  return (static_cast<std::size_t>(k[0] + kmax_) * e + static_cast<std::size_t>(k[1] + kmax_)) * e +
         static_cast<std::size_t>(k[2] + kmax_);
}

const Vec3& NoiseBasis::frame(const Wavevector& k, int alpha) const {
  if (!contains(k)) throw std::out_of_range("wavevector outside the noise basis");
  if (alpha != 0 && alpha != 1) throw std::out_of_range("frame index must be 0 or 1");
  return (*frames_)[slot(k)][static_cast<std::size_t>(alpha)];
}

NoiseBasis NoiseBasis::rotated(double angle) const {
  NoiseBasis b;
  b.kmax_ = kmax_;
  b.frames_ = std::make_shared<std::vector<std::array<Vec3, 2>>>(*frames_);
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& [a0, a1] : *b.frames_) {
    const Vec3 r0{c * a0[0] + s * a1[0], c * a0[1] + s * a1[1], c * a0[2] + s * a1[2]};
    const Vec3 r1{-s * a0[0] + c * a1[0], -s * a0[1] + c * a1[1], -s * a0[2] + c * a1[2]};
    a0 = r0;
    a1 = r1;
  }
  return b;
}

}  // namespace tnsim
