#include "tnsim/grid.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace tnsim {

int max_norm(const Wavevector& k) {
  return std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
}

Grid::Grid(int n) : n_(n) {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("grid size N must be even and >= 8, got " + std::to_string(n));
  }
  cutoff_ = (n - 1) / 3;
  const auto e = static_cast<std::size_t>(extent());
  size_ = e * e * e;

  auto tables = std::make_shared<Tables>();
  for (auto* v : {&tables->kx, &tables->ky, &tables->kz, &tables->k2, &tables->inv_k2, &tables->band}) {
    v->resize(size_);
  }
  auto band = std::make_shared<std::vector<std::size_t>>();
  for (std::size_t i = 0; i < size_; ++i) {
    const Wavevector k = wavevector(i);
    const double k2 = static_cast<double>(norm2(k));
    tables->kx[i] = k[0];
    tables->ky[i] = k[1];
    tables->kz[i] = k[2];
    tables->k2[i] = k2;
    tables->inv_k2[i] = k2 > 0.0 ? 1.0 / k2 : 0.0;
    const bool inside = in_band(k);
    tables->band[i] = inside ? 1.0 : 0.0;
    if (inside) band->push_back(i);
  }
  tables_ = std::move(tables);
  band_ = std::move(band);
}

bool Grid::in_range(const Wavevector& k) const { return max_norm(k) <= half(); }

Wavevector Grid::wavevector(std::size_t idx) const {
  const auto e = static_cast<std::size_t>(extent());
  const int h = half();
  const int z = static_cast<int>(idx % e);
  const int y = static_cast<int>((idx / e) % e);
  const int x = static_cast<int>(idx / (e * e));
  return {x - h, y - h, z - h};
}

}  // namespace tnsim
