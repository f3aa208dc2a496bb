#include "tnsim/kernels.hpp"

namespace tnsim::kernels {
namespace {

void scale_real(Complex* y, const double* s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= s[i];
}

void axpy_real(Complex* y, double a, const Complex* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy_imag_symbol(Complex* y, double a, const double* s, const Complex* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double f = a * s[i];
    y[i] = Complex(y[i].real() - f * x[i].imag(), y[i].imag() + f * x[i].real());
  }
}

double weighted_energy(const Complex* x, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
  }
  return acc;
}

void leray_project(Complex* cx, Complex* cy, Complex* cz, const double* kx, const double* ky,
                   const double* kz, const double* inv_k2, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const Complex dot = kx[i] * cx[i] + ky[i] * cy[i] + kz[i] * cz[i];
    const Complex f = dot * inv_k2[i];
    cx[i] -= kx[i] * f;
    cy[i] -= ky[i] * f;
    cz[i] -= kz[i] * f;
  }
}

void sym3_accumulate(Complex* yx, Complex* yy, Complex* yz, const Complex* xx, const Complex* xy,
                     const Complex* xz, const double* const* m, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mxx = a * m[kXX][i], mxy = a * m[kXY][i], mxz = a * m[kXZ][i];
    const double myy = a * m[kYY][i], myz = a * m[kYZ][i], mzz = a * m[kZZ][i];
    yx[i] += mxx * xx[i] + mxy * xy[i] + mxz * xz[i];
    yy[i] += mxy * xx[i] + myy * xy[i] + myz * xz[i];
    yz[i] += mxz * xx[i] + myz * xy[i] + mzz * xz[i];
  }
}

void multiply(double* out, const double* x, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void axpbyc(double* out, double a, const double* x, double b, const double* y, double c,
            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i] + c;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{SimdLevel::scalar, scale_real,     axpy_real,
                                 axpy_imag_symbol,  weighted_energy, leray_project,
                                 sym3_accumulate,   multiply,       axpbyc};
  return table;
}

}  // namespace tnsim::kernels
