#include <algorithm>
#include <cmath>
#include <set>

#include "internal.hpp"

namespace tnsim {

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::corrector_convergence: return "corrector-convergence";
    case ExperimentKind::energy_audit: return "energy-audit";
    case ExperimentKind::decay: return "decay";
    case ExperimentKind::scaling_limit: return "scaling-limit";
    case ExperimentKind::survival: return "survival";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::corrector_convergence, ExperimentKind::energy_audit, ExperimentKind::decay,
        ExperimentKind::scaling_limit, ExperimentKind::survival}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("kind", "unknown experiment kind '" + s + "'");
}

nlohmann::json ExperimentSpec::to_json() const {
  return {{"kind", to_string(kind)},
          {"sim", sim.to_json()},
          {"n_values", n_values},
          {"mu_values", mu_values},
          {"dt_values", dt_values},
          {"samples", samples},
          {"outdir", outdir.generic_string()},
          {"tag", tag},
          {"init",
           {{"k_min", init.k_min},
            {"k_max", init.k_max},
            {"slope", init.slope},
            {"l2", init.l2},
            {"seed", init.seed}}},
          {"modes", modes},
          {"r0", r0},
          {"cutoff_auto", cutoff_auto}};
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{"kind",    "sim",  "n_values", "mu_values", "dt_values",
                                           "samples", "outdir", "tag",    "init",      "modes",
                                           "r0",      "cutoff_auto"};
  static const std::set<std::string> init_keys{"k_min", "k_max", "slope", "l2", "seed"};
  if (!j.is_object()) throw ValidationError("config", "experiment spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ValidationError("config", "unknown key '" + key + "'");
  }
  ExperimentSpec s;
  try {
    s.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("sim")) s.sim = SimConfig::from_json(j["sim"]);
    s.n_values = j.value("n_values", s.n_values);
    s.mu_values = j.value("mu_values", s.mu_values);
    s.dt_values = j.value("dt_values", s.dt_values);
    s.samples = j.value("samples", s.samples);
    if (j.contains("outdir")) s.outdir = j["outdir"].get<std::string>();
    s.tag = j.value("tag", s.tag);
    if (j.contains("init")) {
      const auto& i = j["init"];
      for (const auto& [key, value] : i.items()) {
        if (!init_keys.count(key)) throw ValidationError("config", "unknown init key '" + key + "'");
      }
      s.init.k_min = i.value("k_min", s.init.k_min);
      s.init.k_max = i.value("k_max", s.init.k_max);
      s.init.slope = i.value("slope", s.init.slope);
      s.init.l2 = i.value("l2", s.init.l2);
      s.init.seed = i.value("seed", s.init.seed);
    }
    if (j.contains("modes")) s.modes = j["modes"].get<std::vector<Wavevector>>();
    s.r0 = j.value("r0", s.r0);
    s.cutoff_auto = j.value("cutoff_auto", s.cutoff_auto);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config", e.what());
  }
  return s;
}

namespace detail {

ExperimentSpec with_defaults(ExperimentSpec s) {
  if (s.n_values.empty() && s.sim.theta.kind == ThetaChoice::Kind::shell) {
    s.n_values = {s.sim.theta.n};
  }
  if (s.mu_values.empty()) s.mu_values = {s.sim.mu};
  if (s.dt_values.empty()) s.dt_values = {s.sim.dt};
  return s;
}

SimConfig sweep_config(const ExperimentSpec& s, int n, double mu, double dt) {
  SimConfig c = s.sim;
  c.mu = mu;
  c.dt = dt;
  if (n > 0) {
    const double alpha =
        s.sim.theta.kind == ThetaChoice::Kind::shell ? s.sim.theta.alpha_decay : 1.0;
    c.theta = ThetaChoice{};
    c.theta.kind = ThetaChoice::Kind::shell;
    c.theta.n = n;
    c.theta.alpha_decay = alpha;
  }
  return c;
}

}  // namespace detail

void validate(const ExperimentSpec& spec) {
  const ExperimentSpec s = detail::with_defaults(spec);
  if (s.samples < 1) throw ValidationError("samples", "need at least one sample");
  if (s.tag.empty() || s.tag.find_first_of("/\\") != std::string::npos) {
    throw ValidationError("tag", "tag must be a nonempty file-name component");
  }
  if (s.mu_values.empty() || s.dt_values.empty()) {
    throw ValidationError("sweep", "sweep lists must be nonempty");
  }
  const bool needs_n = s.kind == ExperimentKind::corrector_convergence ||
                       s.kind == ExperimentKind::scaling_limit ||
                       s.kind == ExperimentKind::survival;
  if (needs_n && s.n_values.empty()) {
    throw ValidationError("sweep", "n_values must be nonempty for " + to_string(s.kind));
  }
  for (int n : s.n_values) {
    if (n < 1) throw ValidationError("theta", "shell index n must be >= 1");
  }
  if (!(s.init.l2 >= 0.0) || !(s.init.k_max >= s.init.k_min)) {
    throw ValidationError("init", "need l2 >= 0 and k_max >= k_min");
  }

  switch (s.kind) {
    case ExperimentKind::corrector_convergence: {
      if (s.modes.empty()) throw ValidationError("corrector-modes", "need at least one mode j");
      const int nmin = *std::min_element(s.n_values.begin(), s.n_values.end());
      for (const auto& j : s.modes) {
        if (j == Wavevector{0, 0, 0}) throw ValidationError("corrector-modes", "j must be nonzero");
        if (static_cast<double>(norm2(j)) > static_cast<double>(nmin) * nmin) {
          throw ValidationError("corrector-modes", "|j| must not exceed the smallest shell index");
        }
      }
      for (double mu : s.mu_values) {
        if (!(mu > 0.0)) throw ValidationError("mu", "corrector convergence needs mu > 0");
      }
      break;
    }
    case ExperimentKind::energy_audit:
      if (s.sim.theta.kind == ThetaChoice::Kind::none) {
        throw ValidationError("energy-audit", "the audit needs a noise spectrum");
      }
      if (!s.sim.nonlinearity) throw ValidationError("energy-audit", "the audit runs with convection on");
      for (double dt : s.dt_values) validate(detail::sweep_config(s, 0, s.sim.mu, dt));
      break;
    case ExperimentKind::decay:
      validate(s.sim);
      break;
    case ExperimentKind::scaling_limit: {
      if (!s.sim.R && !s.cutoff_auto) {
        throw ValidationError("cutoff", "scaling-limit needs R or cutoff_auto");
      }
      const double hi = s.sim.gamma * (1.0 - 2.0 / s.sim.p);
      if (!(s.r0 < hi)) throw ValidationError("scaling-window", "need r0 < gamma (1 - 2/p)");
      for (int n : s.n_values) {
        for (double mu : s.mu_values) validate(detail::sweep_config(s, n, mu, s.sim.dt), true);
      }
      break;
    }
    case ExperimentKind::survival:
      if (s.sim.R) throw ValidationError("survival", "survival runs without the cut-off");
      if (!s.sim.guard) throw ValidationError("guard", "survival needs an explicit guard");
      for (int n : s.n_values) {
        for (double mu : s.mu_values) validate(detail::sweep_config(s, n, mu, s.sim.dt));
      }
      break;
  }
}

}  // namespace tnsim
