#include "tnsim/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace tnsim {
namespace {

// The FFTW planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

struct FftEngine::Impl {
  std::size_t n = 0;
  std::size_t nzh = 0;  // n/2 + 1
  std::unique_ptr<double, FftwFree> real;
  std::unique_ptr<fftw_complex, FftwFree> spec;
  std::unique_ptr<fftw_complex, FftwFree> cbuf;  // lazily, for the c2c check
  fftw_plan c2r = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2c = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (c2r) fftw_destroy_plan(c2r);
    if (r2c) fftw_destroy_plan(r2c);
    if (c2c) fftw_destroy_plan(c2c);
  }
};

FftEngine::FftEngine(const Grid& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
  const int n = grid.n();
  impl_->n = static_cast<std::size_t>(n);
  impl_->nzh = static_cast<std::size_t>(n / 2 + 1);
  const std::size_t nreal = grid.physical_size();
  const std::size_t nspec = impl_->n * impl_->n * impl_->nzh;
  impl_->real.reset(static_cast<double*>(fftw_malloc(sizeof(double) * nreal)));
  impl_->spec.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nspec)));
  if (!impl_->real || !impl_->spec) throw std::bad_alloc();
  {
    std::lock_guard lock(planner_mutex());
    impl_->c2r = fftw_plan_dft_c2r_3d(n, n, n, impl_->spec.get(), impl_->real.get(), FFTW_ESTIMATE);
    impl_->r2c = fftw_plan_dft_r2c_3d(n, n, n, impl_->real.get(), impl_->spec.get(), FFTW_ESTIMATE);
  }
  if (!impl_->c2r || !impl_->r2c) throw std::runtime_error("FFTW planning failed");
  band_ = build_map(true);
  full_ = build_map(false);
}

FftEngine::~FftEngine() = default;

FftEngine::Map FftEngine::build_map(bool band_only) const {
  const int n = grid_.n();
  const int h = grid_.half();
  const auto wrap = [n](int k) { return static_cast<std::size_t>(k < 0 ? k + n : k); };
  const auto packed = [&](const Wavevector& k) {
    return (wrap(k[0]) * static_cast<std::size_t>(n) + wrap(k[1])) * impl_->nzh +
           static_cast<std::size_t>(k[2]);
  };
  Map m;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const Wavevector k = grid_.wavevector(i);
    if (std::abs(k[0]) == h || std::abs(k[1]) == h || std::abs(k[2]) == h) continue;
    if (band_only && !grid_.in_band(k)) continue;
    if (k[2] >= 0) {
      m.scatter_dense.push_back(i);
      m.scatter_packed.push_back(packed(k));
    }
    const bool mirrored = k[2] < 0 || (k[2] == 0 && (k[1] < 0 || (k[1] == 0 && k[0] < 0)));
    if (mirrored) {
      m.mirror_dense.push_back(i);
      m.mirror_packed.push_back(packed(-k));
    } else {
      m.direct_dense.push_back(i);
      m.direct_packed.push_back(packed(k));
    }
  }
  return m;
}

void FftEngine::to_physical(const Complex* coeffs, double* out, Extent extent) {
  const Map& m = map(extent);
  auto* spec = reinterpret_cast<Complex*>(impl_->spec.get());
  std::fill(spec, spec + impl_->n * impl_->n * impl_->nzh, Complex{});
  for (std::size_t q = 0; q < m.scatter_dense.size(); ++q) {
    spec[m.scatter_packed[q]] = coeffs[m.scatter_dense[q]];
  }
  fftw_execute_dft_c2r(impl_->c2r, impl_->spec.get(), impl_->real.get());
  std::copy_n(impl_->real.get(), grid_.physical_size(), out);
}

void FftEngine::from_physical(const double* in, Complex* coeffs, Extent extent) {
  const Map& m = map(extent);
  std::copy_n(in, grid_.physical_size(), impl_->real.get());
  fftw_execute_dft_r2c(impl_->r2c, impl_->real.get(), impl_->spec.get());
  const auto* spec = reinterpret_cast<const Complex*>(impl_->spec.get());
  const double scale = 1.0 / static_cast<double>(grid_.physical_size());
  for (std::size_t q = 0; q < m.direct_dense.size(); ++q) {
    coeffs[m.direct_dense[q]] = scale * spec[m.direct_packed[q]];
  }
  for (std::size_t q = 0; q < m.mirror_dense.size(); ++q) {
    coeffs[m.mirror_dense[q]] = scale * std::conj(spec[m.mirror_packed[q]]);
  }
  // The mean of real data is real.
  const std::size_t zero = grid_.index({0, 0, 0});
  coeffs[zero] = coeffs[zero].real();
}

std::vector<double> FftEngine::to_physical(const SpectralField& f, int component, Extent extent) {
  if (!(f.grid() == grid_)) throw std::invalid_argument("field and FFT engine grids differ");
  std::vector<double> out(grid_.physical_size());
  to_physical(f.component(component), out.data(), extent);
  return out;
}

double FftEngine::physical_imag_ratio(const SpectralField& f) {
  if (!(f.grid() == grid_)) throw std::invalid_argument("field and FFT engine grids differ");
  const int n = grid_.n();
  const std::size_t total = grid_.physical_size();
  if (!impl_->cbuf) {
    impl_->cbuf.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total)));
    if (!impl_->cbuf) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    impl_->c2c = fftw_plan_dft_3d(n, n, n, impl_->cbuf.get(), impl_->cbuf.get(), FFTW_BACKWARD,
                                  FFTW_ESTIMATE);
  }
  auto* buf = reinterpret_cast<Complex*>(impl_->cbuf.get());
  const auto wrap = [n](int k) { return static_cast<std::size_t>(((k % n) + n) % n); };
  double max_re = 0.0;
  double max_im = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::fill(buf, buf + total, Complex{});
    const Complex* src = f.component(c);
    // Both +N/2 and -N/2 alias onto the same grid frequency; summing them
    // keeps the point values exact.
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (src[i] == Complex{}) continue;
      const Wavevector k = grid_.wavevector(i);
      buf[(wrap(k[0]) * static_cast<std::size_t>(n) + wrap(k[1])) * static_cast<std::size_t>(n) +
          wrap(k[2])] += src[i];
    }
    fftw_execute(impl_->c2c);
    for (std::size_t p = 0; p < total; ++p) {
      max_re = std::max(max_re, std::abs(buf[p]));
      max_im = std::max(max_im, std::abs(buf[p].imag()));
    }
  }
  return max_re == 0.0 ? 0.0 : max_im / max_re;
}

}  // namespace tnsim
