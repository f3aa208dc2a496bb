#include <cmath>

#include "tnsim/noise.hpp"

namespace tnsim {
namespace {

// Real bilinear pairing int f . g dx = sum_k f_hat(k) . g_hat(-k).
Complex pairing(const SpectralField& f, const SpectralField& g) {
  const Grid& grid = f.grid();
  Complex acc{};
  for (std::size_t i : grid.band_indices()) {
    const std::size_t j = grid.index(-grid.wavevector(i));
    for (int c = 0; c < 3; ++c) acc += f.component(c)[i] * g.component(c)[j];
  }
  return acc;
}


}  // namespace

CovarianceReport real_noise_covariance_check(const ThetaSpectrum& theta, const NoiseBasis& basis,
                                             const SpectralField& v, int probes,
                                             std::uint64_t probe_seed) {
  const Grid& g = v.grid();
  FftEngine fft(g);
  std::vector<SpectralField> z;
  for (int p = 0; p < probes; ++p) {
    RandomFieldOptions o;
    o.k_max = g.cutoff();
    o.seed = probe_seed + static_cast<std::uint64_t>(p);
    z.push_back(random_divergence_free(g, o));
  }

  CovarianceReport report;
  double sum_c = 0.0, sum_r = 0.0;
  for (const auto& [k, th] : theta.positive()) {
    CovariancePair pair{k, 0.0, 0.0, 1.0, 0.0};
    std::vector<Complex> probe_c(z.size()), probe_r(z.size());
    for (int alpha = 0; alpha < 2; ++alpha) {
      // Complex family: Y = th (c dW + d conj(dW)) with E[dW^2] = 0 and
      // E|dW|^2 = 2 per unit time, so E[Y (x) Y] = 2 th^2 (c (x) d + d (x) c).
      const SpectralField c = transport_mode_apply(v, k, alpha, basis);
      const SpectralField d = transport_mode_apply(v, -k, alpha, basis);
      pair.trace_complex += 4.0 * th * th * pairing(c, d).real();
      for (std::size_t p = 0; p < z.size(); ++p) {
        probe_c[p] += 4.0 * th * th * pairing(c, z[p]) * pairing(d, z[p]);
      }

      // Real family: xi = 2 Re sigma and 2 Im sigma, each with a unit-rate
      // real Brownian motion.
      const Vec3& a = basis.frame(k, alpha);
      SpectralField xi_re(g), xi_im(g);
      const Complex i(0.0, 1.0);
      xi_re.set(k, {a[0], a[1], a[2]});
      xi_re.set(-k, {a[0], a[1], a[2]});
      xi_im.set(k, {-i * a[0], -i * a[1], -i * a[2]});
      xi_im.set(-k, {i * a[0], i * a[1], i * a[2]});
      for (const SpectralField* xi : {&xi_re, &xi_im}) {
        const SpectralField x = transport_by(v, *xi, fft);
        pair.trace_real += th * th * pairing(x, x).real();
        for (std::size_t p = 0; p < z.size(); ++p) {
          const double b = pairing(x, z[p]).real();
          probe_r[p] += th * th * b * b;
        }
      }
    }
    if (pair.trace_complex != 0.0 || pair.trace_real != 0.0) {
      pair.ratio = pair.trace_complex == 0.0 ? INFINITY : pair.trace_real / pair.trace_complex;
    }
    const double scale = std::max(pair.trace_complex, pair.trace_real);
    for (std::size_t p = 0; p < z.size(); ++p) {
      // Probe values are compared relative to the pair's trace so that a
      // probe nearly orthogonal to the increment does not inflate the error.
      const double diff = std::abs(probe_c[p].real() - probe_r[p].real());
      pair.probe_mismatch = std::max(pair.probe_mismatch, scale == 0.0 ? 0.0 : diff / scale);
    }
    sum_c += pair.trace_complex;
    sum_r += pair.trace_real;
    report.pairs.push_back(pair);
  }
  report.common_ratio = (sum_c == 0.0 && sum_r == 0.0) ? 1.0 : sum_r / sum_c;
  for (const auto& p : report.pairs) {
    report.max_deviation = std::max({report.max_deviation, std::abs(p.ratio - report.common_ratio),
                                     p.probe_mismatch});
  }
  report.mismatch = report.max_deviation > 1e-10;
  return report;
}

}  // namespace tnsim
