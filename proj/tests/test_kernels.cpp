// The AVX2 kernels against the scalar reference on random data, including
// lengths that exercise the vector remainder loops.

#include <random>
#include <vector>

#include "doctest.h"
#include "tnsim/kernels.hpp"

using namespace tnsim;
using namespace tnsim::kernels;

namespace {

struct Data {
  std::vector<Complex> c[6];
  std::vector<double> r[8];
};

Data make(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Data d;
  for (auto& v : d.c) {
    v.resize(n);
    for (auto& x : v) x = Complex(u(rng), u(rng));
  }
  for (auto& v : d.r) {
    v.resize(n);
    for (auto& x : v) x = u(rng);
  }
  // inv_k2 slot: keep a few exact zeros like the k = 0 entry.
  if (n > 0) d.r[3][0] = 0.0;
  return d;
}

double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("avx2 kernels match the scalar reference") {
  const KernelTable* v = avx2_table();
  if (v == nullptr || !cpu_supports(SimdLevel::avx2)) {
    MESSAGE("AVX2 unavailable; only the scalar table is exercised");
    return;
  }
  const KernelTable& s = scalar_table();
  constexpr double tol = 1e-13;

  for (std::size_t n : {0, 1, 2, 3, 5, 8, 17, 1000}) {
    CAPTURE(n);
    const Data d = make(n, 100 + n);

    auto y1 = d.c[0], y2 = d.c[0];
    s.scale_real(y1.data(), d.r[0].data(), n);
    v->scale_real(y2.data(), d.r[0].data(), n);
    CHECK(max_diff(y1, y2) <= tol);

    y1 = y2 = d.c[0];
    s.axpy_real(y1.data(), 0.37, d.c[1].data(), n);
    v->axpy_real(y2.data(), 0.37, d.c[1].data(), n);
    CHECK(max_diff(y1, y2) <= tol);

    y1 = y2 = d.c[0];
    s.axpy_imag_symbol(y1.data(), -1.3, d.r[1].data(), d.c[1].data(), n);
    v->axpy_imag_symbol(y2.data(), -1.3, d.r[1].data(), d.c[1].data(), n);
    CHECK(max_diff(y1, y2) <= tol);

    const double e1 = s.weighted_energy(d.c[2].data(), d.r[2].data(), n);
    const double e2 = v->weighted_energy(d.c[2].data(), d.r[2].data(), n);
    CHECK(std::abs(e1 - e2) <= tol * (1.0 + std::abs(e1)));

    auto a1 = d.c[0], b1 = d.c[1], c1 = d.c[2];
    auto a2 = d.c[0], b2 = d.c[1], c2 = d.c[2];
    s.leray_project(a1.data(), b1.data(), c1.data(), d.r[0].data(), d.r[1].data(), d.r[2].data(),
                    d.r[3].data(), n);
    v->leray_project(a2.data(), b2.data(), c2.data(), d.r[0].data(), d.r[1].data(),
                     d.r[2].data(), d.r[3].data(), n);
    CHECK(max_diff(a1, a2) <= tol);
    CHECK(max_diff(b1, b2) <= tol);
    CHECK(max_diff(c1, c2) <= tol);

    const double* m[6] = {d.r[0].data(), d.r[1].data(), d.r[2].data(),
                          d.r[3].data(), d.r[4].data(), d.r[5].data()};
    a1 = a2 = d.c[3];
    b1 = b2 = d.c[4];
    c1 = c2 = d.c[5];
    s.sym3_accumulate(a1.data(), b1.data(), c1.data(), d.c[0].data(), d.c[1].data(),
                      d.c[2].data(), m, 0.9, n);
    v->sym3_accumulate(a2.data(), b2.data(), c2.data(), d.c[0].data(), d.c[1].data(),
                       d.c[2].data(), m, 0.9, n);
    CHECK(max_diff(a1, a2) <= tol);
    CHECK(max_diff(b1, b2) <= tol);
    CHECK(max_diff(c1, c2) <= tol);

    std::vector<double> o1(n), o2(n);
    s.multiply(o1.data(), d.r[6].data(), d.r[7].data(), n);
    v->multiply(o2.data(), d.r[6].data(), d.r[7].data(), n);
    CHECK(max_diff(o1, o2) == 0.0);

    s.axpbyc(o1.data(), 0.5, d.r[6].data(), -2.0, d.r[7].data(), 0.25, n);
    v->axpbyc(o2.data(), 0.5, d.r[6].data(), -2.0, d.r[7].data(), 0.25, n);
    CHECK(max_diff(o1, o2) <= tol);
  }
}

TEST_CASE("dispatch") {
  const SimdLevel before = active().level;
  force(SimdLevel::scalar);
  CHECK(active().level == SimdLevel::scalar);
  if (cpu_supports(SimdLevel::avx2)) {
    force(SimdLevel::avx2);
    CHECK(active().level == SimdLevel::avx2);
  } else {
    CHECK_THROWS(force(SimdLevel::avx2));
  }
  force(before);
  CHECK(to_string(SimdLevel::avx2) == "avx2");
}
