#include "tnsim/spectral_ops.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tnsim/kernels.hpp"

namespace tnsim {
namespace {

std::string describe(const Wavevector& k) {
  std::ostringstream os;
  os << '(' << k[0] << ',' << k[1] << ',' << k[2] << ')';
  return os.str();
}

bool close(const Complex& a, const Complex& b) {
  return std::abs(a - b) <= 1e-14 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

MultiplierOp MultiplierOp::scalar(std::function<Complex(const Wavevector&)> s) {
  return MultiplierOp([s = std::move(s)](const Wavevector& k) {
    const Complex v = s(k);
    CMat3 m{};
    m[0][0] = m[1][1] = m[2][2] = v;
    return m;
  });
}

SpectralField MultiplierOp::apply(const SpectralField& f) const {
  SpectralField out(f.grid());
  for (std::size_t i = 0; i < f.grid().size(); ++i) {
    const CVec3 u = f.at_index(i);
    if (u[0] == Complex{} && u[1] == Complex{} && u[2] == Complex{}) continue;
    const CMat3 m = symbol_(f.grid().wavevector(i));
    CVec3 r{};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) r[a] += m[a][b] * u[b];
    }
    out.set_index(i, r);
  }
  return out;
}

SpectralField field_from_modes(const Grid& grid, std::span<const ModeAssignment> modes) {
  SpectralField f(grid);
  std::vector<char> assigned(grid.size(), 0);
  for (const auto& [k, a] : modes) {
    if (!grid.in_range(k)) {
      throw std::invalid_argument("wavevector " + describe(k) + " outside |k_i| <= N/2 = " +
                                  std::to_string(grid.half()));
    }
    const CVec3 conj_a{std::conj(a[0]), std::conj(a[1]), std::conj(a[2])};
    const std::size_t i = grid.index(k);
    const std::size_t j = grid.index(-k);
    if (i == j) {
      for (int c = 0; c < 3; ++c) {
        if (!close(a[c], conj_a[c])) {
          throw std::invalid_argument("zero mode " + describe(k) + " must have a real amplitude");
        }
      }
    }
    if (assigned[i] && !(close(f.at_index(i)[0], a[0]) && close(f.at_index(i)[1], a[1]) &&
                         close(f.at_index(i)[2], a[2]))) {
      throw std::invalid_argument("conflicting assignment at " + describe(k) +
                                  " (violates conjugate symmetry with -k)");
    }
    f.set_index(i, a);
    f.set_index(j, conj_a);
    assigned[i] = assigned[j] = 1;
  }
  return f;
}

SpectralField helmholtz_project(SpectralField f) {
  const auto& t = f.grid().tables();
  kernels::active().leray_project(f.component(0), f.component(1), f.component(2), t.kx.data(),
                                  t.ky.data(), t.kz.data(), t.inv_k2.data(), f.grid().size());
  return f;
}

SpectralField gradient_part(const SpectralField& f) { return f - helmholtz_project(f); }

SpectralField fractional_laplacian(SpectralField f, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("fractional Laplacian needs gamma > 0");
  const auto& t = f.grid().tables();
  std::vector<double> symbol(f.grid().size());
  for (std::size_t i = 0; i < symbol.size(); ++i) symbol[i] = std::pow(t.k2[i], gamma);
  for (int c = 0; c < 3; ++c) {
    kernels::active().scale_real(f.component(c), symbol.data(), symbol.size());
  }
  return f;
}

SpectralField laplacian(SpectralField f) {
  const auto& t = f.grid().tables();
  std::vector<double> symbol(t.k2);
  for (auto& s : symbol) s *= -kTwoPi * kTwoPi;
  for (int c = 0; c < 3; ++c) {
    kernels::active().scale_real(f.component(c), symbol.data(), symbol.size());
  }
  return f;
}

SpectralField constant_drift(const SpectralField& f, const Vec3& w) {
  const auto& t = f.grid().tables();
  std::vector<double> symbol(f.grid().size());
  for (std::size_t i = 0; i < symbol.size(); ++i) {
    symbol[i] = w[0] * t.kx[i] + w[1] * t.ky[i] + w[2] * t.kz[i];
  }
  SpectralField out(f.grid());
  for (int c = 0; c < 3; ++c) {
    kernels::active().axpy_imag_symbol(out.component(c), kTwoPi, symbol.data(), f.component(c),
                                       symbol.size());
  }
  return out;
}

SpectralField dealias(SpectralField f) {
  const auto& band = f.grid().tables().band;
  for (int c = 0; c < 3; ++c) {
    kernels::active().scale_real(f.component(c), band.data(), band.size());
  }
  return f;
}

Vec3 mean(const SpectralField& f) {
  const CVec3 u = f.at({0, 0, 0});
  return {u[0].real(), u[1].real(), u[2].real()};
}

SpectralField subtract_mean(SpectralField f) {
  f.set({0, 0, 0}, CVec3{});
  return f;
}

std::vector<double> sobolev_weights(const Grid& grid, double s) {
  const auto& k2 = grid.tables().k2;
  std::vector<double> w(k2.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(1.0 + k2[i], s);
  return w;
}

double weighted_norm(const SpectralField& f, std::span<const double> weights) {
  if (weights.size() != f.grid().size()) throw std::invalid_argument("weight table size mismatch");
  const auto& k = kernels::active();
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) acc += k.weighted_energy(f.component(c), weights.data(), weights.size());
  return std::sqrt(acc);
}

double sobolev_norm(const SpectralField& f, double s) {
  return weighted_norm(f, sobolev_weights(f.grid(), s));
}

int dyadic_block(const Wavevector& k) {
  const long k2 = norm2(k);
  if (k2 <= 1) return 0;
  // Largest j with 4^(j-1) <= |k|^2, computed in integers.
  int j = 1;
  long bound = 4;
  while (bound <= k2) {
    bound *= 4;
    ++j;
  }
  return j;
}

double besov_norm(const SpectralField& f, double s, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("Besov exponent p must lie in (1, inf)");
  const Grid& g = f.grid();
  std::vector<double> block_energy;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const CVec3 u = f.at_index(i);
    const double e = std::norm(u[0]) + std::norm(u[1]) + std::norm(u[2]);
    if (e == 0.0) continue;
    const auto j = static_cast<std::size_t>(dyadic_block(g.wavevector(i)));
    if (block_energy.size() <= j) block_energy.resize(j + 1, 0.0);
    block_energy[j] += e;
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < block_energy.size(); ++j) {
    if (block_energy[j] == 0.0) continue;
    acc += std::pow(2.0, static_cast<double>(j) * s * p) * std::pow(std::sqrt(block_energy[j]), p);
  }
  return std::pow(acc, 1.0 / p);
}

SpectralField random_divergence_free(const Grid& grid, const RandomFieldOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(grid);
  const double kmin2 = options.k_min * options.k_min;
  const double kmax2 = options.k_max * options.k_max;
  for (std::size_t i : grid.band_indices()) {
    const Wavevector k = grid.wavevector(i);
    const auto k2 = static_cast<double>(norm2(k));
    if (k2 == 0.0 || k2 < kmin2 || k2 > kmax2) continue;
    // Visit each conjugate pair once, from its lexicographically positive member.
    const bool positive = k[0] > 0 || (k[0] == 0 && (k[1] > 0 || (k[1] == 0 && k[2] > 0)));
    if (!positive) continue;
    const double amp = std::pow(k2, -0.5 * options.slope);
    CVec3 a;
    for (auto& c : a) {
      const double re = normal(rng);
      const double im = normal(rng);
      c = amp * Complex(re, im);
    }
    f.set_index(i, a);
    f.set_index(grid.index(-k), {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])});
  }
  f = helmholtz_project(std::move(f));
  const double norm = l2_norm(f);
  if (norm > 0.0) f *= options.l2 / norm;
  return f;
}

}  // namespace tnsim
