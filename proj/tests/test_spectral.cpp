#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "tnsim/fft.hpp"
#include "tnsim/snapshot.hpp"
#include "tnsim/spectral_ops.hpp"

using namespace tnsim;
using tnsim::testing::random_field;
using tnsim::testing::random_raw_field;
using tnsim::testing::rel_diff;

namespace {
constexpr double kPi = std::numbers::pi;

SpectralField single(const Grid& g, Wavevector k, CVec3 a) {
  const ModeAssignment m{k, a};
  return field_from_modes(g, std::span(&m, 1));
}

int nonzero_count(const SpectralField& f) {
  int n = 0;
  for (std::size_t i = 0; i < f.grid().size(); ++i) {
    const CVec3 u = f.at_index(i);
    if (u[0] != Complex{} || u[1] != Complex{} || u[2] != Complex{}) ++n;
  }
  return n;
}
}  // namespace

TEST_CASE("grid geometry") {
  CHECK_THROWS_AS(Grid(15), std::invalid_argument);
  CHECK_THROWS_AS(Grid(6), std::invalid_argument);
  const Grid g(32);
  CHECK(g.cutoff() == 10);
  CHECK(Grid(16).cutoff() == 5);
  CHECK(g.in_range({16, -16, 0}));
  CHECK_FALSE(g.in_range({17, 0, 0}));
  for (std::size_t i : {std::size_t{0}, g.size() / 2, g.size() - 1}) {
    CHECK(g.index(g.wavevector(i)) == i);
  }
  // 3K + 1 <= N: products of two band fields land inside |k| <= N - K - 1.
  for (int n : {8, 16, 24, 32, 48}) CHECK(3 * Grid(n).cutoff() + 1 <= n);
}

TEST_CASE("field_from_modes") {
  const Grid g(16);
  SUBCASE("symmetry completion") {
    const auto f = single(g, {1, 0, 0}, {0, Complex(0, 1), 0});
    CHECK(nonzero_count(f) == 2);
    CHECK(f.at({-1, 0, 0})[1] == Complex(0, -1));
    CHECK(f.conjugate_asymmetry() == 0.0);
  }
  SUBCASE("empty list gives the zero field") {
    CHECK(field_from_modes(g, {}).max_abs() == 0.0);
  }
  SUBCASE("out of range rejected") {
    CHECK_THROWS_WITH_AS(single(g, {9, 0, 0}, {1, 0, 0}), doctest::Contains("(9,0,0)"),
                         std::invalid_argument);
  }
  SUBCASE("conflicting k and -k rejected") {
    const std::vector<ModeAssignment> m{{{1, 0, 0}, {0, 1, 0}}, {{-1, 0, 0}, {0, 2, 0}}};
    CHECK_THROWS_AS(field_from_modes(g, m), std::invalid_argument);
    const std::vector<ModeAssignment> ok{{{1, 0, 0}, {0, Complex(1, 1), 0}},
                                         {{-1, 0, 0}, {0, Complex(1, -1), 0}}};
    CHECK_NOTHROW(field_from_modes(g, ok));
  }
  SUBCASE("complex mean rejected") {
    CHECK_THROWS_AS(single(g, {0, 0, 0}, {Complex(0, 1), 0, 0}), std::invalid_argument);
  }
}

TEST_CASE("helmholtz projection") {
  const Grid g(16);
  SUBCASE("gradients annihilated") {
    const auto f = helmholtz_project(single(g, {1, 0, 0}, {Complex(0, 2), 0, 0}));
    CHECK(f.max_abs() == 0.0);
  }
  SUBCASE("transverse modes fixed") {
    const auto f = single(g, {1, 2, 0}, {2, -1, 3});
    CHECK(helmholtz_project(f) == f);
  }
  SUBCASE("k=(1,1,0) on (1,0,0)") {
    const auto p = helmholtz_project(single(g, {1, 1, 0}, {1, 0, 0})).at({1, 1, 0});
    CHECK(std::abs(p[0] - 0.5) < 1e-15);
    CHECK(std::abs(p[1] + 0.5) < 1e-15);
    CHECK(std::abs(p[2]) == 0.0);
  }
  SUBCASE("mean untouched") {
    const auto f = single(g, {0, 0, 0}, {1, 2, 3});
    CHECK(helmholtz_project(f) == f);
  }
  SUBCASE("properties on random fields") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto f = random_raw_field(g, seed);
      const auto p = helmholtz_project(f);
      const auto q = gradient_part(f);
      CHECK(rel_diff(helmholtz_project(p), p) <= 1e-13);
      CHECK(p.divergence_residual() <= 1e-13);
      CHECK(std::abs(inner(p, q)) <= 1e-12 * l2_norm(f) * l2_norm(f));
      CHECK(q.max_abs() > 0.0);
    }
  }
}

TEST_CASE("fractional laplacian") {
  const Grid g(16);
  const auto f = fractional_laplacian(single(g, {1, 2, 2}, {2, -1, 0}), 1.5);
  CHECK(std::abs(f.at({1, 2, 2})[0] - 54.0) < 1e-12);
  CHECK(fractional_laplacian(single(g, {0, 0, 0}, {1, 1, 1}), 0.7).max_abs() == 0.0);
  CHECK_THROWS_AS(fractional_laplacian(SpectralField(g), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fractional_laplacian(SpectralField(g), -1.0), std::invalid_argument);

  // gamma = 1 is -Delta up to the (2 pi)^2 that the bare |k|^2 symbol omits.
  const auto r = random_field(g, 7);
  auto minus_lap = laplacian(r);
  minus_lap *= -1.0 / (4.0 * kPi * kPi);
  CHECK(rel_diff(fractional_laplacian(r, 1.0), minus_lap) <= 1e-14);
}

TEST_CASE("constant drift") {
  const Grid g(16);
  const auto f = single(g, {3, 0, 0}, {0, 1, 0});
  CHECK(constant_drift(f, {0, 0, 0}).max_abs() == 0.0);
  CHECK(constant_drift(single(g, {0, 1, 0}, {1, 0, 0}), {1, 0, 0}).max_abs() == 0.0);
  const auto d = constant_drift(f, {1, 0, 0}).at({3, 0, 0});
  CHECK(std::abs(d[1] - Complex(0, 6 * kPi)) < 1e-13);
  // Realness: a real drift keeps conjugate symmetry.
  CHECK(constant_drift(random_field(g, 3), {0.3, -1.1, 2.0}).conjugate_asymmetry() <= 1e-15);
}

TEST_CASE("sobolev norm") {
  const Grid g(16);
  CHECK(sobolev_norm(SpectralField(g), 1.3) == 0.0);
  const CVec3 a{0, Complex(0.6, 0.8), 0};
  const auto f = single(g, {1, 2, 0}, a);
  CHECK(std::abs(sobolev_norm(f, 0.0) - std::sqrt(2.0)) < 1e-15);
  const double s = 1.7, sp = 0.4;
  CHECK(std::abs(sobolev_norm(f, s) / sobolev_norm(f, sp) - std::pow(6.0, (s - sp) / 2)) < 1e-13);
  const auto r = random_field(g, 11);
  double prev = 0.0;
  for (double si = -1.0; si <= 3.0; si += 0.25) {
    const double v = sobolev_norm(r, si);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("besov norm") {
  const Grid g(32);
  CHECK(besov_norm(SpectralField(g), 0.5, 3.0) == 0.0);
  CHECK_THROWS_AS(besov_norm(SpectralField(g), 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(besov_norm(SpectralField(g), 0.5, INFINITY), std::invalid_argument);

  CHECK(dyadic_block({0, 0, 0}) == 0);
  CHECK(dyadic_block({1, 0, 0}) == 0);
  CHECK(dyadic_block({1, 1, 0}) == 1);
  CHECK(dyadic_block({2, 0, 0}) == 2);
  CHECK(dyadic_block({3, 2, 1}) == 2);  // |k| = sqrt(14) < 4
  CHECK(dyadic_block({4, 0, 0}) == 3);

  // Single block j = 3 (4 <= |k| < 8): norm = 2^{3s} * block L2 norm.
  const std::vector<ModeAssignment> m{{{4, 0, 0}, {0, 1, 0}}, {{0, 5, 1}, {1, 0, 0}},
                                      {{3, 3, 3}, {1, -1, 0}}};
  const auto f = field_from_modes(g, m);
  for (double s : {-0.5, 0.3, 1.2}) {
    for (double p : {1.5, 2.0, 4.0}) {
      CHECK(besov_norm(f, s, p) == doctest::Approx(std::pow(2.0, 3 * s) * l2_norm(f)).epsilon(1e-13));
    }
  }

  // p = 2 is comparable to H^s with constants inside [1/4, 4] for s in [0, 1].
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = random_field(g, seed, 10.0, 0.0);
    for (double s : {0.0, 0.5, 1.0}) {
      const double ratio = besov_norm(r, s, 2.0) / sobolev_norm(r, s);
      CHECK(ratio >= 0.25);
      CHECK(ratio <= 4.0);
    }
  }
}

TEST_CASE("dealias") {
  const Grid g(32);
  const auto inside = single(g, {10, -10, 3}, {0, 0, 1});
  CHECK(dealias(inside) == inside);
  CHECK(dealias(single(g, {11, 0, 0}, {0, 1, 0})).max_abs() == 0.0);
  const std::vector<ModeAssignment> m{{{2, 0, 0}, {0, 1, 0}}, {{12, 1, 0}, {0, 0, 3}}};
  const auto mixed = field_from_modes(g, m);
  CHECK(l2_norm(dealias(mixed)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("mean handling") {
  const Grid g(16);
  const auto c = single(g, {0, 0, 0}, {1, 2, 3});
  CHECK(mean(c) == Vec3{1, 2, 3});
  const auto r = random_field(g, 5);
  CHECK(subtract_mean(r) == r);
  auto mixed = r + c;
  CHECK(mean(mixed) == Vec3{1, 2, 3});
  CHECK(subtract_mean(mixed) == r);
}

TEST_CASE("random divergence-free fields") {
  const Grid g(32);
  const auto f = random_field(g, 9, 8.0, 1.0);
  CHECK(f.conjugate_asymmetry() == 0.0);
  CHECK(f.divergence_residual() <= 1e-14);
  CHECK(mean(f) == Vec3{0, 0, 0});
  CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.out_of_band_max() == 0.0);
  CHECK(random_field(g, 9, 8.0, 1.0) == f);
  CHECK_FALSE(random_field(g, 10, 8.0, 1.0) == f);
}

TEST_CASE("physical transforms") {
  const Grid g(16);
  FftEngine fft(g);
  const auto f = random_field(g, 21, 5.0, 0.0);

  SUBCASE("point values match direct summation") {
    const auto u = fft.to_physical(f, 1);
    const int n = g.n();
    for (const auto& p : std::vector<std::array<int, 3>>{{0, 0, 0}, {3, 7, 11}, {15, 1, 8}}) {
      Complex direct{};
      for (std::size_t i : g.band_indices()) {
        const Wavevector k = g.wavevector(i);
        const double phase = kTwoPi * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2]) / n;
        direct += f.component(1)[i] * std::polar(1.0, phase);
      }
      const double got = u[(static_cast<std::size_t>(p[0]) * n + p[1]) * n + p[2]];
      CHECK(std::abs(got - direct.real()) <= 1e-13);
      CHECK(std::abs(direct.imag()) <= 1e-13);
    }
  }

  SUBCASE("round trip") {
    SpectralField back(g);
    for (int c = 0; c < 3; ++c) {
      const auto u = fft.to_physical(f, c);
      fft.from_physical(u.data(), back.component(c));
    }
    CHECK(rel_diff(back, f) <= 1e-14);
    CHECK(back.conjugate_asymmetry() == 0.0);
  }

  SUBCASE("every operation preserves realness") {
    CHECK(fft.physical_imag_ratio(f) <= 1e-12);
    CHECK(fft.physical_imag_ratio(helmholtz_project(random_raw_field(g, 3))) <= 1e-12);
    CHECK(fft.physical_imag_ratio(fractional_laplacian(f, 1.125)) <= 1e-12);
    CHECK(fft.physical_imag_ratio(constant_drift(f, {1, 2, 3})) <= 1e-12);
    CHECK(fft.physical_imag_ratio(dealias(f)) <= 1e-12);
    CHECK(fft.physical_imag_ratio(laplacian(f)) <= 1e-12);
    // A lone complex mode is detected.
    SpectralField lone(g);
    lone.set({1, 0, 0}, {1, 0, 0});
    CHECK(fft.physical_imag_ratio(lone) > 0.5);
  }
}

TEST_CASE("snapshot round trip is bit exact") {
  const Grid g(32);
  auto f = random_field(g, 33, 10.0, 0.5);
  f += single(g, {0, 0, 0}, {0.1, -1.0 / 3.0, 2e-300});
  const auto j = snapshot_to_json(f);
  CHECK(snapshot_from_json(nlohmann::json::parse(j.dump())) == f);

  const auto path = std::filesystem::temp_directory_path() / "tnsim_snapshot_test.json";
  save_snapshot(f, path);
  CHECK(load_snapshot(path) == f);
  std::filesystem::remove(path);

  SpectralField lone(g);
  lone.set({1, 0, 0}, {1, 0, 0});
  CHECK_THROWS_AS(snapshot_to_json(lone), std::invalid_argument);
}
