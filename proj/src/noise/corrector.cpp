#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tnsim/kernels.hpp"
#include "tnsim/noise.hpp"

namespace tnsim {
namespace {

using Sym = std::array<double, 6>;  // kernels::Sym3 order

// P_m as a symmetric matrix; identity at m = 0.
Sym projector(const Wavevector& m) {
  const auto n2 = static_cast<double>(norm2(m));
  if (n2 == 0.0) return {1, 0, 0, 1, 0, 1};
  const double x = m[0], y = m[1], z = m[2];
  return {1 - x * x / n2, -x * y / n2, -x * z / n2, 1 - y * y / n2, -y * z / n2, 1 - z * z / n2};
}

std::array<std::array<double, 3>, 3> full(const Sym& s) {
  return {{{s[0], s[1], s[2]}, {s[1], s[3], s[4]}, {s[2], s[4], s[5]}}};
}

// c * P_j S P_j
Sym sandwich(const Sym& s, const Wavevector& j, double c) {
  const auto p = full(projector(j));
  const auto m = full(s);
  std::array<std::array<double, 3>, 3> t{}, r{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int q = 0; q < 3; ++q) t[a][b] += p[a][q] * m[q][b];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int q = 0; q < 3; ++q) r[a][b] += t[a][q] * p[q][b];
  return {c * r[0][0], c * r[0][1], c * r[0][2], c * r[1][1], c * r[1][2], c * r[2][2]};
}

// Largest |eigenvalue| of a symmetric 3x3 matrix (trigonometric solution).
double spectral_abs_max(const Sym& s) {
  const double p1 = s[1] * s[1] + s[2] * s[2] + s[4] * s[4];
  const double q = (s[0] + s[3] + s[5]) / 3.0;
  if (p1 == 0.0) return std::max({std::abs(s[0]), std::abs(s[3]), std::abs(s[5])});
  const double p2 = (s[0] - q) * (s[0] - q) + (s[3] - q) * (s[3] - q) + (s[5] - q) * (s[5] - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const double b0 = (s[0] - q) / p, b3 = (s[3] - q) / p, b5 = (s[5] - q) / p;
  const double b1 = s[1] / p, b2 = s[2] / p, b4 = s[4] / p;
  const double det = b0 * (b3 * b5 - b4 * b4) - b1 * (b1 * b5 - b4 * b2) + b2 * (b1 * b4 - b3 * b2);
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2 * p * std::cos(phi);
  const double e3 = q + 2 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3 * q - e1 - e3;
  return std::max({std::abs(e1), std::abs(e2), std::abs(e3)});
}

Sym symbol_sym(const Wavevector& j, const ThetaSpectrum& theta, const NoiseBasis& basis, double mu,
               const Grid* band) {
  if (j == Wavevector{0, 0, 0}) return {};
  Sym acc{};
  for (const auto& [k, th] : theta.entries()) {
    const Wavevector m = j + k;
    if (band != nullptr && !band->in_band(m)) continue;
    double w = 0.0;
    for (int alpha = 0; alpha < 2; ++alpha) {
      const Vec3& a = basis.frame(k, alpha);
      const double aj = a[0] * j[0] + a[1] * j[1] + a[2] * j[2];
      w += aj * aj;
    }
    w *= th * th;
    if (w == 0.0) continue;
    const Sym p = projector(m);
    for (int e = 0; e < 6; ++e) acc[e] += w * p[e];
  }
  return sandwich(acc, j, -1.5 * mu * kTwoPi * kTwoPi);
}

void require_radial(const ThetaSpectrum& theta) {
  if (!theta.radially_symmetric()) {
    throw std::invalid_argument("the corrector identity needs a radially symmetric theta");
  }
}

}  // namespace

Corrector::Corrector(const Grid& grid, const ThetaSpectrum& theta, const NoiseBasis& basis,
                     double mu)
    : grid_(grid), mu_(mu) {
  require_radial(theta);
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be nonnegative");
  if (!theta.empty() && theta.max_component() > basis.kmax()) {
    throw std::invalid_argument("noise basis does not cover the theta support");
  }
  auto table = std::make_shared<std::array<std::vector<double>, 6>>();
  for (auto& col : *table) col.assign(grid.size(), 0.0);
  for (std::size_t i : grid.band_indices()) {
    const Sym m = symbol_sym(grid.wavevector(i), theta, basis, mu, &grid);
    for (int e = 0; e < 6; ++e) (*table)[static_cast<std::size_t>(e)][i] = m[e];
    radius_ = std::max(radius_, spectral_abs_max(m));
  }
  table_ = std::move(table);
}

void Corrector::accumulate(SpectralField& y, double a, const SpectralField& v) const {
  if (!(v.grid() == grid_) || !(y.grid() == grid_)) throw std::invalid_argument("grid mismatch");
  const double* m[6];
  for (int e = 0; e < 6; ++e) m[e] = (*table_)[static_cast<std::size_t>(e)].data();
  kernels::active().sym3_accumulate(y.component(0), y.component(1), y.component(2),
                                    v.component(0), v.component(1), v.component(2), m, a,
                                    grid_.size());
}

SpectralField Corrector::apply(const SpectralField& v) const {
  SpectralField out(grid_);
  accumulate(out, 1.0, v);
  return out;
}

CMat3 corrector_symbol(const Wavevector& j, const ThetaSpectrum& theta, const NoiseBasis& basis,
                       double mu, const Grid* band) {
  const auto f = full(symbol_sym(j, theta, basis, mu, band));
  CMat3 out{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out[a][b] = f[a][b];
  return out;
}

SpectralField corrector_apply(const SpectralField& v, const ThetaSpectrum& theta,
                              const NoiseBasis& basis, double mu) {
  require_radial(theta);
  if (v.divergence_residual() > 1e-10) {
    throw std::invalid_argument("corrector needs a divergence-free field");
  }
  return Corrector(v.grid(), theta, basis, mu).apply(v);
}

double corrector_limit_error(const Wavevector& j, const CVec3& a, int n, double alpha_decay,
                             double mu) {
  if (j == Wavevector{0, 0, 0}) throw std::invalid_argument("limit error needs j != 0");
  if (!(mu > 0.0)) throw std::invalid_argument("limit error needs mu > 0");
  const double an = std::sqrt(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]));
  const Complex aj = a[0] * double(j[0]) + a[1] * double(j[1]) + a[2] * double(j[2]);
  if (an == 0.0) throw std::invalid_argument("limit error needs a nonzero amplitude");
  if (std::abs(aj) > 1e-12 * an * std::sqrt(double(norm2(j)))) {
    throw std::invalid_argument("amplitude must be orthogonal to j");
  }
  const ThetaSpectrum theta = ThetaSpectrum::shell(n, alpha_decay);
  const NoiseBasis basis = NoiseBasis::build(2 * n);
  const double lap = -0.6 * mu * kTwoPi * kTwoPi * static_cast<double>(norm2(j));
  double num = 0.0, den = 0.0;
  for (const Wavevector& mode : {j, -j}) {
    const CMat3 m = corrector_symbol(mode, theta, basis, mu);
    const CVec3 u = mode == j ? a : CVec3{std::conj(a[0]), std::conj(a[1]), std::conj(a[2])};
    for (int r = 0; r < 3; ++r) {
      Complex pu = m[r][0] * u[0] + m[r][1] * u[1] + m[r][2] * u[2];
      num += std::norm(pu - lap * u[r]);
      den += std::norm(lap * u[r]);
    }
  }
  return std::sqrt(num / den);
}

}  // namespace tnsim
