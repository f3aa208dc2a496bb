#pragma once

// Data-parallel inner loops shared by the spectral operators and the
// time steppers. Every kernel has a scalar reference implementation and an
// AVX2/FMA variant; the active table is chosen once at startup from the CPU
// features, or forced with TNSIM_SIMD=scalar|avx2.
//
// Complex arrays are std::complex<double>, which is layout-compatible with
// interleaved (re, im) pairs.

#include <cstddef>
#include <string_view>

#include "tnsim/grid.hpp"

namespace tnsim::kernels {

enum class SimdLevel { scalar, avx2 };

std::string_view to_string(SimdLevel level);

/// Order of the six independent entries of a symmetric 3x3 matrix.
enum Sym3 { kXX = 0, kXY, kXZ, kYY, kYZ, kZZ };

struct KernelTable {
  SimdLevel level;

  // y[i] *= s[i]
  void (*scale_real)(Complex* y, const double* s, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy_real)(Complex* y, double a, const Complex* x, std::size_t n);
  // y[i] += i * a * s[i] * x[i]   (derivative multipliers 2*pi*i*k_l)
  void (*axpy_imag_symbol)(Complex* y, double a, const double* s, const Complex* x,
                           std::size_t n);
  // sum_i w[i] * |x[i]|^2
  double (*weighted_energy)(const Complex* x, const double* w, std::size_t n);
  // c <- c - k (k . c) / |k|^2 per mode; inv_k2 is 0 at k = 0
  void (*leray_project)(Complex* cx, Complex* cy, Complex* cz, const double* kx,
                        const double* ky, const double* kz, const double* inv_k2,
                        std::size_t n);
  // y[i] += a * M[i] x[i] with M symmetric, entries m[Sym3][i]
  void (*sym3_accumulate)(Complex* yx, Complex* yy, Complex* yz, const Complex* xx,
                          const Complex* xy, const Complex* xz, const double* const* m,
                          double a, std::size_t n);
  // out[i] = x[i] * y[i]
  void (*multiply)(double* out, const double* x, const double* y, std::size_t n);
  // out[i] = a * x[i] + b * y[i] + c
  void (*axpbyc)(double* out, double a, const double* x, double b, const double* y, double c,
                 std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_table();

bool cpu_supports(SimdLevel level);

/// The dispatched table. Resolved once; thread-safe.
const KernelTable& active();

/// Overrides the dispatched table (tests and benchmarks). Throws if the
/// level is not supported on this CPU.
void force(SimdLevel level);

}  // namespace tnsim::kernels
