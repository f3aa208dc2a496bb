#include <cmath>
#include <set>
#include <sstream>

#include "internal.hpp"

namespace tnsim {
namespace {

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> table,
             const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw ValidationError(what, "unknown value '" + s + "'");
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::euler: return "euler";
    case Scheme::heun: return "heun";
    case Scheme::midpoint: return "midpoint";
  }
  return "?";
}

std::string to_string(Viscosity v) {
  switch (v) {
    case Viscosity::none: return "none";
    case Viscosity::viscous: return "viscous";
    case Viscosity::effective: return "effective";
  }
  return "?";
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::deterministic: return "deterministic";
    case Mode::stochastic: return "stochastic";
    case Mode::stochastic_cutoff: return "stochastic-cutoff";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  return parse_enum<Scheme>(
      s, {{"euler", Scheme::euler}, {"heun", Scheme::heun}, {"midpoint", Scheme::midpoint}},
      "scheme");
}

Viscosity viscosity_from_string(const std::string& s) {
  return parse_enum<Viscosity>(s,
                               {{"none", Viscosity::none},
                                {"viscous", Viscosity::viscous},
                                {"effective", Viscosity::effective}},
                               "viscosity");
}

Mode mode_from_string(const std::string& s) {
  return parse_enum<Mode>(s,
                          {{"deterministic", Mode::deterministic},
                           {"stochastic", Mode::stochastic},
                           {"stochastic-cutoff", Mode::stochastic_cutoff}},
                          "mode");
}

ThetaSpectrum ThetaChoice::build() const {
  switch (kind) {
    case Kind::none: return {};
    case Kind::shell: return ThetaSpectrum::shell(n, alpha_decay);
    case Kind::explicit_modes: return ThetaSpectrum::from_entries(modes);
  }
  return {};
}

std::uint64_t SimConfig::steps() const {
  return static_cast<std::uint64_t>(std::llround(T / dt));
}

double SimConfig::effective_guard() const {
  if (guard) return *guard;
  if (R) return 10.0 * *R;
  return std::numeric_limits<double>::infinity();
}

nlohmann::json SimConfig::to_json() const {
  nlohmann::json th;
  switch (theta.kind) {
    case ThetaChoice::Kind::none: th = {{"kind", "none"}}; break;
    case ThetaChoice::Kind::shell:
      th = {{"kind", "shell"}, {"n", theta.n}, {"alpha_decay", theta.alpha_decay}};
      break;
    case ThetaChoice::Kind::explicit_modes: {
      nlohmann::json modes = nlohmann::json::array();
      for (const auto& e : theta.modes) modes.push_back({{"k", e.k}, {"theta", e.theta}});
      th = {{"kind", "explicit"}, {"modes", modes}};
      break;
    }
  }
  return {{"gamma", gamma},
          {"mu", mu},
          {"N", N},
          {"dt", dt},
          {"T", T},
          {"theta", th},
          {"R", R ? nlohmann::json(*R) : nlohmann::json(nullptr)},
          {"r", r},
          {"w", w},
          {"p", p},
          {"seed", seed},
          {"scheme", to_string(scheme)},
          {"viscosity", to_string(viscosity)},
          {"nonlinearity", nonlinearity},
          {"record_every", record_every},
          {"guard", guard ? nlohmann::json(*guard) : nlohmann::json(nullptr)},
          {"growth_bound", growth_bound},
          {"stability_bound", stability_bound},
          {"snapshot_times", snapshot_times}};
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{
      "gamma", "mu",        "N",         "dt",          "T",           "theta",        "R",
      "r",     "w",         "p",         "seed",        "scheme",      "viscosity",    "nonlinearity",
      "record_every",       "guard",     "growth_bound", "stability_bound", "snapshot_times"};
  if (!j.is_object()) throw ValidationError("config", "simulation config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ValidationError("config", "unknown key '" + key + "'");
  }
  SimConfig c;
  try {
    c.gamma = j.value("gamma", c.gamma);
    c.mu = j.value("mu", c.mu);
    c.N = j.value("N", c.N);
    c.dt = j.value("dt", c.dt);
    c.T = j.value("T", c.T);
    if (j.contains("theta") && !j["theta"].is_null()) {
      const auto& t = j["theta"];
      const std::string kind = t.value("kind", "none");
      if (kind == "none") {
        c.theta.kind = ThetaChoice::Kind::none;
      } else if (kind == "shell") {
        c.theta.kind = ThetaChoice::Kind::shell;
        c.theta.n = t.at("n").get<int>();
        c.theta.alpha_decay = t.value("alpha_decay", 1.0);
      } else if (kind == "explicit") {
        c.theta.kind = ThetaChoice::Kind::explicit_modes;
        for (const auto& m : t.at("modes")) {
          c.theta.modes.push_back({m.at("k").get<Wavevector>(), m.at("theta").get<double>()});
        }
      } else {
        throw ValidationError("theta", "unknown theta kind '" + kind + "'");
      }
    }
    if (j.contains("R") && !j["R"].is_null()) c.R = j["R"].get<double>();
    c.r = j.value("r", c.r);
    if (j.contains("w")) c.w = j["w"].get<Vec3>();
    c.p = j.value("p", c.p);
    c.seed = j.value("seed", c.seed);
    if (j.contains("scheme")) c.scheme = scheme_from_string(j["scheme"].get<std::string>());
    if (j.contains("viscosity")) {
      c.viscosity = viscosity_from_string(j["viscosity"].get<std::string>());
    }
    c.nonlinearity = j.value("nonlinearity", c.nonlinearity);
    c.record_every = j.value("record_every", c.record_every);
    if (j.contains("guard") && !j["guard"].is_null()) c.guard = j["guard"].get<double>();
    c.growth_bound = j.value("growth_bound", c.growth_bound);
    c.stability_bound = j.value("stability_bound", c.stability_bound);
    if (j.contains("snapshot_times")) c.snapshot_times = j["snapshot_times"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config", e.what());
  }
  return c;
}

namespace detail {

void validate_static(const SimConfig& c, bool scaling_window) {
  if (!(c.gamma > 1.0) || !std::isfinite(c.gamma)) {
    throw ValidationError("gamma", "need gamma > 1, got " + fmt(c.gamma));
  }
  if (!(c.mu >= 0.0) || !std::isfinite(c.mu)) throw ValidationError("mu", "need mu >= 0");
  if (c.N < 8 || c.N % 2 != 0) throw ValidationError("grid", "N must be even and >= 8");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ValidationError("dt", "need dt > 0");
  if (!(c.T >= c.dt) || !std::isfinite(c.T)) throw ValidationError("horizon", "need T >= dt");
  const double steps = c.T / c.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
    throw ValidationError("horizon", "T must be an integer multiple of dt");
  }
  if (!(c.p > 1.0) || !std::isfinite(c.p)) throw ValidationError("p", "need 1 < p < inf");
  if (!std::isfinite(c.r)) throw ValidationError("r", "r must be finite");
  if (c.R && !(*c.R > 0.0)) throw ValidationError("cutoff", "need R > 0");
  if (c.guard && !(*c.guard > 0.0)) throw ValidationError("guard", "need guard > 0");
  if (c.record_every < 1) throw ValidationError("record_every", "need record_every >= 1");
  if (!(c.growth_bound > 0.0)) throw ValidationError("growth_bound", "need growth_bound > 0");
  if (!(c.stability_bound > 0.0)) {
    throw ValidationError("stability_bound", "need stability_bound > 0");
  }
  for (double s : c.snapshot_times) {
    if (!(s >= 0.0 && s <= c.T)) throw ValidationError("snapshot_times", "times must lie in [0, T]");
  }
  for (double x : c.w) {
    if (!std::isfinite(x)) throw ValidationError("w", "drift must be finite");
  }

  if (c.theta.kind == ThetaChoice::Kind::shell) {
    if (c.theta.n < 1) throw ValidationError("theta", "shell index n must be >= 1");
    if (!(c.theta.alpha_decay > 0.0)) throw ValidationError("theta", "alpha_decay must be > 0");
  }
  if (c.theta.kind != ThetaChoice::Kind::none) {
    ThetaSpectrum t;
    try {
      t = c.theta.build();
    } catch (const std::invalid_argument& e) {
      throw ValidationError("theta", e.what());
    }
    if (!t.radially_symmetric()) {
      throw ValidationError("theta", "the corrector requires a radially symmetric theta");
    }
    // Shifts j + k of band modes by the noise must stay resolvable:
    // N/3 >= |k|_inf + 2, i.e. N/3 >= 2n + 2 for the shell n.
    const int m = t.max_component();
    if (static_cast<double>(c.N) / 3.0 < m + 2) {
      throw ValidationError("noise-grid", "N/3 = " + fmt(c.N / 3.0) + " < " + std::to_string(m + 2) +
                                              " (2n + 2 for the theta support, max |k_i| = " +
                                              std::to_string(m) + ")");
    }
  }

  if (scaling_window) {
    const CriticalExponents e = critical_exponents(c.gamma);
    const double hi = c.gamma * (1.0 - 2.0 / c.p);
    if (!(c.p > e.p_crit)) {
      throw ValidationError("scaling-window", "need p > 4 gamma / (6 gamma - 5) = " + fmt(e.p_crit));
    }
    if (!(c.r > e.delta && c.r < hi)) {
      throw ValidationError("scaling-window", "need 5/2 - 2 gamma = " + fmt(e.delta) + " < r = " +
                                                  fmt(c.r) + " < gamma (1 - 2/p) = " + fmt(hi));
    }
  }
}

void validate_stability(const SimConfig& c, double radius) {
  if (c.dt * radius > c.stability_bound) {
    throw ValidationError("stability", "dt * (corrector spectral radius) = " + fmt(c.dt * radius) +
                                           " exceeds " + fmt(c.stability_bound) +
                                           "; reduce dt or mu");
  }
}

}  // namespace detail

void validate(const SimConfig& cfg, bool scaling_window) {
  detail::validate_static(cfg, scaling_window);
  if (cfg.theta.kind != ThetaChoice::Kind::none) {
    const ThetaSpectrum t = cfg.theta.build();
    if (t.empty()) return;
    const Corrector corr(Grid(cfg.N), t, NoiseBasis::build(t.max_component()), cfg.mu);
    detail::validate_stability(cfg, corr.spectral_radius());
  }
}

}  // namespace tnsim
