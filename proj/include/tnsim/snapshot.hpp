#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "tnsim/spectral_field.hpp"

namespace tnsim {

/// JSON snapshot of a real field: grid metadata plus (k, Re u_hat, Im u_hat)
/// for the nonzero coefficients of the half-lattice k_z > 0, or k_z = 0 and
/// k_y > 0, or k_z = k_y = 0 and k_x >= 0. Doubles are written in shortest
/// round-trip form, so save/load is bit-exact for conjugate-symmetric fields.
nlohmann::json snapshot_to_json(const SpectralField& f);
SpectralField snapshot_from_json(const nlohmann::json& j);

void save_snapshot(const SpectralField& f, const std::filesystem::path& path);
SpectralField load_snapshot(const std::filesystem::path& path);

}  // namespace tnsim
