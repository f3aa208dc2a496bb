// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "tnsim/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace tnsim::kernels {
namespace {

inline const double* as_doubles(const Complex* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(Complex* p) { return reinterpret_cast<double*>(p); }

// [s0, s0, s1, s1] from two consecutive reals.
inline __m256d dup_pairs(const double* s) {
  const __m128d v = _mm_loadu_pd(s);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(v), 0x50);
}

void scale_real(Complex* y, const double* s, std::size_t n) {
  double* yd = as_doubles(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_mul_pd(v, dup_pairs(s + i)));
  }
  for (; i < n; ++i) y[i] *= s[i];
}

void axpy_real(Complex* y, double a, const Complex* x, std::size_t n) {
  double* yd = as_doubles(y);
  const double* xd = as_doubles(x);
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_fmadd_pd(va, vx, vy));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void axpy_imag_symbol(Complex* y, double a, const double* s, const Complex* x, std::size_t n) {
  double* yd = as_doubles(y);
  const double* xd = as_doubles(x);
  const __m256d va = _mm256_set1_pd(a);
  const __m256d sign = _mm256_setr_pd(-1.0, 1.0, -1.0, 1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d f = _mm256_mul_pd(va, dup_pairs(s + i));
    // (re, im) -> (-im, re)
    const __m256d swapped = _mm256_mul_pd(_mm256_permute_pd(_mm256_loadu_pd(xd + 2 * i), 0x5), sign);
    const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_fmadd_pd(f, swapped, vy));
  }
  for (; i < n; ++i) {
    const double f = a * s[i];
    y[i] = Complex(y[i].real() - f * x[i].imag(), y[i].imag() + f * x[i].real());
  }
}

double weighted_energy(const Complex* x, const double* w, std::size_t n) {
  const double* xd = as_doubles(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(xd + 2 * i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), dup_pairs(w + i), acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
  return total;
}

void leray_project(Complex* cx, Complex* cy, Complex* cz, const double* kx, const double* ky,
                   const double* kz, const double* inv_k2, std::size_t n) {
  double* px = as_doubles(cx);
  double* py = as_doubles(cy);
  double* pz = as_doubles(cz);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vkx = dup_pairs(kx + i);
    const __m256d vky = dup_pairs(ky + i);
    const __m256d vkz = dup_pairs(kz + i);
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    __m256d vz = _mm256_loadu_pd(pz + 2 * i);
    __m256d dot = _mm256_mul_pd(vkx, vx);
    dot = _mm256_fmadd_pd(vky, vy, dot);
    dot = _mm256_fmadd_pd(vkz, vz, dot);
    const __m256d f = _mm256_mul_pd(dot, dup_pairs(inv_k2 + i));
    vx = _mm256_fnmadd_pd(vkx, f, vx);
    vy = _mm256_fnmadd_pd(vky, f, vy);
    vz = _mm256_fnmadd_pd(vkz, f, vz);
    _mm256_storeu_pd(px + 2 * i, vx);
    _mm256_storeu_pd(py + 2 * i, vy);
    _mm256_storeu_pd(pz + 2 * i, vz);
  }
  for (; i < n; ++i) {
    const Complex dot = kx[i] * cx[i] + ky[i] * cy[i] + kz[i] * cz[i];
    const Complex f = dot * inv_k2[i];
    cx[i] -= kx[i] * f;
    cy[i] -= ky[i] * f;
    cz[i] -= kz[i] * f;
  }
}

void sym3_accumulate(Complex* yx, Complex* yy, Complex* yz, const Complex* xx, const Complex* xy,
                     const Complex* xz, const double* const* m, double a, std::size_t n) {
  double* oyx = as_doubles(yx);
  double* oyy = as_doubles(yy);
  double* oyz = as_doubles(yz);
  const double* ix = as_doubles(xx);
  const double* iy = as_doubles(xy);
  const double* iz = as_doubles(xz);
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d mxx = _mm256_mul_pd(va, dup_pairs(m[kXX] + i));
    const __m256d mxy = _mm256_mul_pd(va, dup_pairs(m[kXY] + i));
    const __m256d mxz = _mm256_mul_pd(va, dup_pairs(m[kXZ] + i));
    const __m256d myy = _mm256_mul_pd(va, dup_pairs(m[kYY] + i));
    const __m256d myz = _mm256_mul_pd(va, dup_pairs(m[kYZ] + i));
    const __m256d mzz = _mm256_mul_pd(va, dup_pairs(m[kZZ] + i));
    const __m256d vx = _mm256_loadu_pd(ix + 2 * i);
    const __m256d vy = _mm256_loadu_pd(iy + 2 * i);
    const __m256d vz = _mm256_loadu_pd(iz + 2 * i);
    __m256d rx = _mm256_mul_pd(mxx, vx);
    rx = _mm256_fmadd_pd(mxy, vy, rx);
    rx = _mm256_fmadd_pd(mxz, vz, rx);
    __m256d ry = _mm256_mul_pd(mxy, vx);
    ry = _mm256_fmadd_pd(myy, vy, ry);
    ry = _mm256_fmadd_pd(myz, vz, ry);
    __m256d rz = _mm256_mul_pd(mxz, vx);
    rz = _mm256_fmadd_pd(myz, vy, rz);
    rz = _mm256_fmadd_pd(mzz, vz, rz);
    _mm256_storeu_pd(oyx + 2 * i, _mm256_add_pd(_mm256_loadu_pd(oyx + 2 * i), rx));
    _mm256_storeu_pd(oyy + 2 * i, _mm256_add_pd(_mm256_loadu_pd(oyy + 2 * i), ry));
    _mm256_storeu_pd(oyz + 2 * i, _mm256_add_pd(_mm256_loadu_pd(oyz + 2 * i), rz));
  }
  for (; i < n; ++i) {
    const double mxx = a * m[kXX][i], mxy = a * m[kXY][i], mxz = a * m[kXZ][i];
    const double myy = a * m[kYY][i], myz = a * m[kYZ][i], mzz = a * m[kZZ][i];
    yx[i] += mxx * xx[i] + mxy * xy[i] + mxz * xz[i];
    yy[i] += mxy * xx[i] + myy * xy[i] + myz * xz[i];
    yz[i] += mxz * xx[i] + myz * xy[i] + mzz * xz[i];
  }
}

void multiply(double* out, const double* x, const double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void axpbyc(double* out, double a, const double* x, double b, const double* y, double c,
            std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                      _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), vc));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i] + c;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{SimdLevel::avx2, scale_real,     axpy_real,
                                 axpy_imag_symbol, weighted_energy, leray_project,
                                 sym3_accumulate,  multiply,       axpbyc};
  return &table;
}

}  // namespace tnsim::kernels

#else

namespace tnsim::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace tnsim::kernels

#endif
