#include <random>
#include <stdexcept>

#include "tnsim/noise.hpp"

namespace tnsim {
namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t sample, std::uint64_t step) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(sample), hi(sample), lo(step), hi(step)};
  return std::mt19937_64(seq);
}

}  // namespace

BrownianDriver::BrownianDriver(std::uint64_t seed, std::size_t positive_modes)
    : seed_(seed), modes_(positive_modes) {}

NoiseIncrements BrownianDriver::increments(std::uint64_t sample, std::uint64_t step,
                                           double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("Brownian increments need dt > 0");
  auto rng = stream(seed_, sample, step);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  NoiseIncrements inc;
  inc.dw.resize(modes_);
  for (auto& pair : inc.dw) {
    for (auto& w : pair) {
      const double b_plus = normal(rng);   // B^{k,a}
      const double b_minus = normal(rng);  // B^{-k,a}
      w = Complex(b_plus, b_minus);
    }
  }
  return inc;
}

Complex BrownianDriver::increment(std::uint64_t sample, std::uint64_t step, std::size_t mode,
                                  int alpha, double dt) const {
  if (mode >= modes_ || (alpha != 0 && alpha != 1)) {
    throw std::out_of_range("Brownian increment address out of range");
  }
  return increments(sample, step, dt).dw[mode][static_cast<std::size_t>(alpha)];
}

}  // namespace tnsim
