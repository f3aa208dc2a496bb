// Command-line front end. Exit codes: 0 success, 1 invalid input or
// configuration, 2 runtime abort (non-finite state, rejected step, I/O).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tnsim/dynamics.hpp"
#include "tnsim/experiments.hpp"

using namespace tnsim;
using Json = nlohmann::json;

namespace {

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config", path + ": " + e.what());
  }
}

struct SimFlags {
  std::optional<double> gamma, mu, dt, T, R, r, p, guard, alpha_decay;
  std::optional<int> N, theta_n, record_every;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scheme, viscosity;
  std::optional<std::vector<double>> w;
  bool no_theta = false, linear = false;

  void add(CLI::App* app) {
    app->add_option("--gamma", gamma, "hyperviscosity exponent (> 1)");
    app->add_option("--mu", mu, "noise intensity");
    app->add_option("--N", N, "grid points per axis (even, >= 8)");
    app->add_option("--dt", dt, "time step");
    app->add_option("--T", T, "horizon");
    app->add_option("--theta-n", theta_n, "shell index n of the noise spectrum");
    app->add_option("--alpha-decay", alpha_decay, "shell weights |k|^-alpha");
    app->add_flag("--no-theta", no_theta, "switch the noise off");
    app->add_option("--R", R, "cut-off radius");
    app->add_option("--r", r, "Sobolev exponent of the cut-off and H^r diagnostic");
    app->add_option("--p", p, "integrability exponent of the Besov diagnostic");
    app->add_option("--guard", guard, "blow-up guard on ||v||_{H^r}");
    app->add_option("--seed", seed, "Brownian seed");
    app->add_option("--scheme", scheme, "euler | heun | midpoint");
    app->add_option("--viscosity", viscosity, "none | viscous | effective (deterministic runs)");
    app->add_option("--record-every", record_every, "sampling cadence in steps");
    app->add_option("--w", w, "extra constant drift (3 values)")->expected(3);
    app->add_flag("--linear", linear, "switch convection off");
  }

  void apply(SimConfig& c) const {
    if (gamma) c.gamma = *gamma;
    if (mu) c.mu = *mu;
    if (N) c.N = *N;
    if (dt) c.dt = *dt;
    if (T) c.T = *T;
    if (theta_n) {
      c.theta.kind = ThetaChoice::Kind::shell;
      c.theta.n = *theta_n;
    }
    if (alpha_decay) c.theta.alpha_decay = *alpha_decay;
    if (no_theta) c.theta = ThetaChoice{};
    if (R) c.R = *R;
    if (r) c.r = *r;
    if (p) c.p = *p;
    if (guard) c.guard = *guard;
    if (seed) c.seed = *seed;
    if (scheme) c.scheme = scheme_from_string(*scheme);
    if (viscosity) c.viscosity = viscosity_from_string(*viscosity);
    if (record_every) c.record_every = *record_every;
    if (w) c.w = {(*w)[0], (*w)[1], (*w)[2]};
    if (linear) c.nonlinearity = false;
  }
};

struct InitFlags {
  std::optional<double> l2, k_min, k_max, slope;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--init-l2", l2, "L2 norm of the random initial field");
    app->add_option("--init-kmin", k_min, "smallest |k| of the initial field");
    app->add_option("--init-kmax", k_max, "largest |k| of the initial field");
    app->add_option("--init-slope", slope, "initial amplitudes ~ |k|^-slope");
    app->add_option("--init-seed", seed, "seed of the initial field");
  }
  void apply(RandomFieldOptions& o) const {
    if (l2) o.l2 = *l2;
    if (k_min) o.k_min = *k_min;
    if (k_max) o.k_max = *k_max;
    if (slope) o.slope = *slope;
    if (seed) o.seed = *seed;
  }
};

struct ExpFlags {
  std::string config;
  std::optional<std::vector<int>> n_values;
  std::optional<std::vector<double>> mu_values, dt_values;
  std::optional<int> samples;
  std::optional<std::string> out, tag;
  std::optional<double> r0;
  bool cutoff_auto = false;
  int workers = 0;
  SimFlags sim;
  InitFlags init;

  void add(CLI::App* app) {
    app->add_option("--config", config, "experiment spec (JSON)");
    app->add_option("--n-values", n_values, "shell sweep");
    app->add_option("--mu-values", mu_values, "mu sweep");
    app->add_option("--dt-values", dt_values, "time-step sweep");
    app->add_option("--samples", samples, "Monte Carlo samples per sweep point");
    app->add_option("--out", out, "output directory");
    app->add_option("--tag", tag, "output file tag");
    app->add_option("--r0", r0, "distance exponent (scaling-limit)");
    app->add_flag("--cutoff-auto", cutoff_auto, "R from the deterministic run (scaling-limit)");
    app->add_option("--workers", workers, "worker threads (default: TNSIM_WORKERS or all cores)");
    sim.add(app);
    init.add(app);
  }

  ExperimentSpec build(ExperimentKind kind) const {
    ExperimentSpec s;
    if (!config.empty()) {
      const Json j = read_json(config);
      Json k = j;
      if (!k.contains("kind")) k["kind"] = to_string(kind);
      s = ExperimentSpec::from_json(k);
      if (s.kind != kind) {
        throw ValidationError("kind", "config is a " + to_string(s.kind) + " spec");
      }
    }
    s.kind = kind;
    sim.apply(s.sim);
    init.apply(s.init);
    if (n_values) s.n_values = *n_values;
    if (mu_values) s.mu_values = *mu_values;
    if (dt_values) s.dt_values = *dt_values;
    if (samples) s.samples = *samples;
    if (out) s.outdir = *out;
    if (tag) s.tag = *tag;
    if (r0) s.r0 = *r0;
    if (cutoff_auto) s.cutoff_auto = true;
    return s;
  }
};

std::string list(const Json& a) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) os << ' ';
    if (a[i].is_number()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4g", a[i].get<double>());
      os << buf;
    } else {
      os << a[i].dump();
    }
  }
  os << ']';
  return os.str();
}

std::string one_line(const ResultTable& t) {
  const Json& s = t.summary;
  std::ostringstream os;
  os << to_string(t.kind) << ": " << t.rows.size() << " rows";
  switch (t.kind) {
    case ExperimentKind::corrector_convergence:
      for (const auto& m : s["modes"]) {
        os << "; j=" << m["j"].dump() << " errors " << list(m["errors"])
           << " decreasing=" << (m["strictly_decreasing"].get<bool>() ? "yes" : "no");
      }
      break;
    case ExperimentKind::energy_audit: {
      Json meds = Json::array();
      for (const auto& g : s["groups"]) meds.push_back(g["stats"]["median"]);
      os << "; median |defect| " << list(meds) << " ratios " << list(s["median_ratios"])
         << " theta=0 control " << s["control_defect"].get<double>();
      break;
    }
    case ExperimentKind::decay: os << "; max ratio " << s["max_ratio"].get<double>(); break;
    case ExperimentKind::scaling_limit:
      for (const auto& tr : s["trend"]) {
        os << "; mu=" << tr["mu"].get<double>() << " medians " << list(tr["medians"])
           << " decreasing=" << (tr["strictly_decreasing"].get<bool>() ? "yes" : "no");
      }
      break;
    case ExperimentKind::survival: {
      Json f = Json::array();
      for (const auto& g : s["groups"]) f.push_back(g["stats"]["frequency"]);
      os << "; frequencies " << list(f);
      break;
    }
  }
  return os.str();
}

// Smallest-denominator fraction within 1e-12 relative, if one exists below 1000.
std::string as_fraction(double x) {
  for (long q = 1; q <= 1000; ++q) {
    const double p = std::round(x * static_cast<double>(q));
    if (std::abs(p / static_cast<double>(q) - x) <= 1e-12 * std::max(1.0, std::abs(x))) {
      return q == 1 ? std::to_string(static_cast<long>(p))
                    : std::to_string(static_cast<long>(p)) + "/" + std::to_string(q);
    }
  }
  return "";
}

std::string with_fraction(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  const std::string f = as_fraction(x);
  return f.empty() || f == buf ? std::string(buf) : f + " (" + buf + ")";
}

int run(int argc, char** argv) {
  CLI::App app{"tnsim: hyperviscous Navier-Stokes with transport noise"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "integrate one trajectory and write its CSV");
  std::string sim_config, mode_name = "stochastic", sim_out = ".", sim_tag = "run";
  std::uint64_t sample = 0;
  SimFlags sim_flags;
  InitFlags sim_init;
  sim_cmd->add_option("--config", sim_config, "simulation config (JSON)");
  sim_cmd->add_option("--mode", mode_name, "deterministic | stochastic | stochastic-cutoff");
  sim_cmd->add_option("--sample", sample, "Monte Carlo sample index");
  sim_cmd->add_option("--out", sim_out, "output directory");
  sim_cmd->add_option("--tag", sim_tag, "output file tag");
  sim_flags.add(sim_cmd);
  sim_init.add(sim_cmd);

  // experiments
  struct Sub {
    CLI::App* cmd;
    ExperimentKind kind;
    ExpFlags flags;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  const auto add_exp = [&](const char* name, ExperimentKind kind, const char* help) {
    auto s = std::make_unique<Sub>();
    s->cmd = app.add_subcommand(name, help);
    s->kind = kind;
    s->flags.add(s->cmd);
    subs.push_back(std::move(s));
  };
  add_exp("corrector", ExperimentKind::corrector_convergence, "corrector limit along shells");
  add_exp("energy", ExperimentKind::energy_audit, "pathwise energy-balance audit over dt");
  add_exp("decay", ExperimentKind::decay, "exponential L2 decay ratios");
  add_exp("scaling-limit", ExperimentKind::scaling_limit,
          "cut-off stochastic runs against the effective deterministic run");
  add_exp("survival", ExperimentKind::survival, "guard-survival frequencies over (n, mu)");

  // exponents
  auto* exp_cmd = app.add_subcommand("exponents", "critical exponents for gamma");
  double gamma = 1.125;
  std::optional<double> p_probe;
  exp_cmd->add_option("--gamma", gamma, "hyperviscosity exponent");
  exp_cmd->add_option("--p", p_probe, "also print beta0(p)");

  // validate
  auto* val_cmd = app.add_subcommand("validate", "check a simulation config or experiment spec");
  std::string val_config;
  bool val_window = false;
  SimFlags val_flags;
  val_cmd->add_option("--config", val_config, "config file (JSON)")->required();
  val_cmd->add_flag("--scaling-window", val_window, "also enforce the scaling-limit window");
  val_flags.add(val_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (sim_cmd->parsed()) {
    SimConfig cfg;
    if (!sim_config.empty()) cfg = SimConfig::from_json(read_json(sim_config));
    sim_flags.apply(cfg);
    const Mode mode = mode_from_string(mode_name);
    RandomFieldOptions init;
    sim_init.apply(init);
    validate(cfg);
    const SpectralField u0 = random_divergence_free(Grid(cfg.N), init);
    const TrajectoryRecord rec = integrate(cfg, u0, mode, sample);
    std::filesystem::create_directories(sim_out);
    const std::filesystem::path stem = std::filesystem::path(sim_out) / ("simulate-" + sim_tag);
    write_trajectory_csv(rec, stem.string() + ".csv");
    Json meta = run_metadata(cfg, "simulate");
    meta["mode"] = to_string(mode);
    meta["sample"] = sample;
    meta["init"] = {{"k_min", init.k_min}, {"k_max", init.k_max}, {"slope", init.slope},
                    {"l2", init.l2},       {"seed", init.seed}};
    meta["steps_taken"] = rec.steps_taken;
    meta["blowup"] = rec.blowup;
    write_json(meta, stem.string() + ".meta.json");
    const Sample& last = rec.samples.back();
    std::printf("simulate: %s, %llu steps, %zu samples, t=%.6g L2=%.6g Hr=%.6g defect=%.3g%s -> %s.csv\n",
                to_string(mode).c_str(), static_cast<unsigned long long>(rec.steps_taken),
                rec.samples.size(), last.t, last.l2, last.hr, last.energy_defect,
                rec.blowup ? " BLOWUP" : "", stem.string().c_str());
    return 0;
  }

  for (const auto& s : subs) {
    if (!s->cmd->parsed()) continue;
    const ExperimentSpec spec = s->flags.build(s->kind);
    const ResultTable t = run_experiment(spec, {s->flags.workers});
    const OutputPaths paths = write_result(spec, t);
    std::printf("%s -> %s\n", one_line(t).c_str(), paths.csv.string().c_str());
    return 0;
  }

  if (exp_cmd->parsed()) {
    const CriticalExponents e = critical_exponents(gamma);
    std::printf("gamma=%s delta=%s p_c=%s beta=%s", with_fraction(gamma).c_str(),
                with_fraction(e.delta).c_str(), with_fraction(e.p_crit).c_str(),
                with_fraction(e.beta).c_str());
    if (p_probe) std::printf(" beta0(%g)=%s", *p_probe, with_fraction(e.beta0(*p_probe)).c_str());
    std::printf("\n");
    return 0;
  }

  if (val_cmd->parsed()) {
    const Json j = read_json(val_config);
    if (j.is_object() && j.contains("kind")) {
      ExperimentSpec spec = ExperimentSpec::from_json(j);
      val_flags.apply(spec.sim);
      validate(spec);
      std::printf("valid %s spec\n", to_string(spec.kind).c_str());
    } else {
      SimConfig cfg = SimConfig::from_json(j);
      val_flags.apply(cfg);
      validate(cfg, val_window);
      std::printf("valid simulation config\n");
    }
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid: %s\n", e.what());
    return 1;
  } catch (const NumericalAbort& e) {
    std::fprintf(stderr, "aborted at step %llu: %s\n", static_cast<unsigned long long>(e.step()),
                 e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
