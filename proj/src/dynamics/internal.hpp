#pragma once

#include "tnsim/dynamics.hpp"

namespace tnsim::detail {

// Checks that need no corrector table.
void validate_static(const SimConfig& c, bool scaling_window);
// dt * radius <= stability_bound, radius being the corrector spectral radius.
void validate_stability(const SimConfig& c, double radius);

}  // namespace tnsim::detail
