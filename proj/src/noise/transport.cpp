#include <cmath>
#include <stdexcept>

#include "tnsim/kernels.hpp"
#include "tnsim/noise.hpp"

namespace tnsim {

SpectralField transport_mode_apply(const SpectralField& v, const Wavevector& k, int alpha,
                                   const NoiseBasis& basis) {
  const Vec3& a = basis.frame(k, alpha);
  const Grid& g = v.grid();
  SpectralField out(g);
  for (std::size_t i : g.band_indices()) {
    const CVec3 u = v.at_index(i);
    if (u[0] == Complex{} && u[1] == Complex{} && u[2] == Complex{}) continue;
    const Wavevector j = g.wavevector(i);
    const Wavevector m = j + k;
    if (!g.in_band(m)) continue;
    const double aj = a[0] * j[0] + a[1] * j[1] + a[2] * j[2];
    if (aj == 0.0) continue;
    const Complex f(0.0, kTwoPi * aj);
    const std::size_t o = g.index(m);
    out.set_index(o, {out.at_index(o)[0] + f * u[0], out.at_index(o)[1] + f * u[1],
                      out.at_index(o)[2] + f * u[2]});
  }
  return helmholtz_project(std::move(out));
}

SpectralField noise_velocity_field(const Grid& grid, const ThetaSpectrum& theta,
                                   const NoiseBasis& basis, const NoiseIncrements& inc) {
  if (inc.dw.size() != theta.positive().size()) {
    throw std::invalid_argument("increment count does not match the theta support");
  }
  SpectralField x(grid);
  for (std::size_t m = 0; m < theta.positive().size(); ++m) {
    const auto& [k, th] = theta.positive()[m];
    if (!grid.in_band(k)) throw std::invalid_argument("noise mode outside the dealias band");
    CVec3 c{};
    for (int alpha = 0; alpha < 2; ++alpha) {
      const Vec3& a = basis.frame(k, alpha);
      const Complex w = th * inc.dw[m][static_cast<std::size_t>(alpha)];
      for (int d = 0; d < 3; ++d) c[d] += a[d] * w;
    }
    x.set(k, c);
    x.set(-k, {std::conj(c[0]), std::conj(c[1]), std::conj(c[2])});
  }
  return x;
}

SpectralField transport_by(const SpectralField& v, const SpectralField& carrier, FftEngine& fft) {
  const Grid& g = v.grid();
  if (!(carrier.grid() == g) || !(fft.grid() == g)) throw std::invalid_argument("grid mismatch");
  if (v.out_of_band_max() != 0.0 || carrier.out_of_band_max() != 0.0) {
    throw std::invalid_argument("transport_by needs band-limited inputs");
  }
  const std::size_t np = g.physical_size();
  std::vector<double> vp(3 * np), cp(3 * np), prod(np);
  for (int c = 0; c < 3; ++c) {
    fft.to_physical(v.component(c), vp.data() + c * np);
    fft.to_physical(carrier.component(c), cp.data() + c * np);
  }
  const auto& kt = kernels::active();
  const auto& t = g.tables();
  const double* sym[3] = {t.kx.data(), t.ky.data(), t.kz.data()};
  SpectralField out(g), tmp(g);
  for (int i = 0; i < 3; ++i) {
    for (int l = 0; l < 3; ++l) {
      kt.multiply(prod.data(), vp.data() + i * np, cp.data() + l * np, np);
      fft.from_physical(prod.data(), tmp.component(0));
      kt.axpy_imag_symbol(out.component(i), kTwoPi, sym[l], tmp.component(0), g.size());
    }
  }
  return helmholtz_project(std::move(out));
}

SpectralField noise_increment_field(const SpectralField& v, const ThetaSpectrum& theta,
                                    const NoiseBasis& basis, const NoiseIncrements& inc,
                                    double mu, NoisePath path, FftEngine* fft) {
  if (v.divergence_residual() > 1e-10) {
    throw std::invalid_argument("noise increment needs a divergence-free field");
  }
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be nonnegative");
  const Grid& g = v.grid();
  const double scale = std::sqrt(1.5 * mu);
  if (theta.empty()) return SpectralField(g);
  if (path == NoisePath::fast) {
    std::unique_ptr<FftEngine> own;
    if (fft == nullptr) {
      own = std::make_unique<FftEngine>(g);
      fft = own.get();
    }
    SpectralField out = transport_by(v, noise_velocity_field(g, theta, basis, inc), *fft);
    out *= scale;
    return out;
  }
  if (inc.dw.size() != theta.positive().size()) {
    throw std::invalid_argument("increment count does not match the theta support");
  }
  SpectralField out(g);
  for (std::size_t m = 0; m < theta.positive().size(); ++m) {
    const auto& [k, th] = theta.positive()[m];
    for (int alpha = 0; alpha < 2; ++alpha) {
      const Complex w = inc.dw[m][static_cast<std::size_t>(alpha)];
      SpectralField plus = transport_mode_apply(v, k, alpha, basis);
      plus *= th * w;
      SpectralField minus = transport_mode_apply(v, -k, alpha, basis);
      minus *= th * std::conj(w);
      out += plus;
      out += minus;
    }
  }
  out *= scale;
  return out;
}

}  // namespace tnsim
