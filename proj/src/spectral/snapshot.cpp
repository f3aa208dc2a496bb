#include "tnsim/snapshot.hpp"

#include <fstream>
#include <stdexcept>

namespace tnsim {
namespace {

bool in_half_lattice(const Wavevector& k) {
  return k[2] > 0 || (k[2] == 0 && (k[1] > 0 || (k[1] == 0 && k[0] >= 0)));
}

}  // namespace

nlohmann::json snapshot_to_json(const SpectralField& f) {
  if (f.conjugate_asymmetry() != 0.0) {
    throw std::invalid_argument("snapshot requires an exactly conjugate-symmetric field");
  }
  const Grid& g = f.grid();
  nlohmann::json modes = nlohmann::json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Wavevector k = g.wavevector(i);
    if (!in_half_lattice(k)) continue;
    const CVec3 u = f.at_index(i);
    if (u[0] == Complex{} && u[1] == Complex{} && u[2] == Complex{}) continue;
    modes.push_back({{"k", k},
                     {"re", {u[0].real(), u[1].real(), u[2].real()}},
                     {"im", {u[0].imag(), u[1].imag(), u[2].imag()}}});
  }
  return {{"format", "tnsim-spectral-field"},
          {"version", 1},
          {"dimension", 3},
          {"N", g.n()},
          {"cutoff", g.cutoff()},
          {"modes", std::move(modes)}};
}

SpectralField snapshot_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "tnsim-spectral-field") {
    throw std::invalid_argument("not a tnsim field snapshot");
  }
  const Grid grid(j.at("N").get<int>());
  SpectralField f(grid);
  for (const auto& m : j.at("modes")) {
    const auto k = m.at("k").get<Wavevector>();
    if (!grid.in_range(k) || !in_half_lattice(k)) {
      throw std::invalid_argument("snapshot mode outside the stored half-lattice");
    }
    const auto re = m.at("re").get<std::array<double, 3>>();
    const auto im = m.at("im").get<std::array<double, 3>>();
    const CVec3 u{Complex(re[0], im[0]), Complex(re[1], im[1]), Complex(re[2], im[2])};
    f.set(k, u);
    f.set(-k, {std::conj(u[0]), std::conj(u[1]), std::conj(u[2])});
  }
  return f;
}

void save_snapshot(const SpectralField& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << snapshot_to_json(f).dump() << '\n';
}

SpectralField load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return snapshot_from_json(nlohmann::json::parse(in));
}

}  // namespace tnsim
