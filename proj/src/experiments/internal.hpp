#pragma once

#include "tnsim/experiments.hpp"

namespace tnsim::detail {

// Fills empty sweeps from the embedded SimConfig.
ExperimentSpec with_defaults(ExperimentSpec s);
// The SimConfig of one sweep point; n = 0 keeps the spec's own theta.
SimConfig sweep_config(const ExperimentSpec& s, int n, double mu, double dt);

}  // namespace tnsim::detail
