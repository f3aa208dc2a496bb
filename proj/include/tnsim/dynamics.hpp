#pragma once

// Time integration of the hyperviscous Navier-Stokes system with transport
// noise, its cut-off variant, and the deterministic effective-viscosity
// system, plus trajectory diagnostics.
//
// Runs act on the fluctuation v = u - mean(u). The mean w0 = mean(u0) is
// conserved by every term, and re-enters only as the constant drift
// ((w0 + w) . grad) v, so the k = 0 coefficient is never touched.

#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tnsim/fft.hpp"
#include "tnsim/noise.hpp"
#include "tnsim/spectral_ops.hpp"

namespace tnsim {

class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string rule, const std::string& what)
      : std::invalid_argument(rule + ": " + what), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

class StepRejected : public std::runtime_error {
 public:
  StepRejected(std::uint64_t step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + " rejected: " + what), step_(step) {}
  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t step_;
};

class NumericalAbort : public std::runtime_error {
 public:
  explicit NumericalAbort(std::uint64_t step)
      : std::runtime_error("non-finite coefficient after step " + std::to_string(step)),
        step_(step) {}
  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t step_;
};

enum class Scheme {
  euler,     ///< exponential (Lawson) Euler; Euler-Maruyama noise
  heun,      ///< two-stage Lawson-Heun drift; Euler-Maruyama noise
  midpoint,  ///< energy-conserving implicit midpoint for convection
};
enum class Viscosity { none, viscous, effective };
enum class Mode { deterministic, stochastic, stochastic_cutoff };

std::string to_string(Scheme s);
std::string to_string(Viscosity v);
std::string to_string(Mode m);
Scheme scheme_from_string(const std::string& s);
Viscosity viscosity_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);

struct ThetaChoice {
  enum class Kind { none, shell, explicit_modes } kind = Kind::none;
  int n = 1;
  double alpha_decay = 1.0;
  std::vector<ThetaEntry> modes;

  ThetaSpectrum build() const;
};

struct SimConfig {
  double gamma = 1.125;
  double mu = 1.0;
  int N = 32;
  double dt = 1e-3;
  double T = 1.0;
  ThetaChoice theta;
  /// Cut-off radius; required for stochastic-cutoff runs.
  std::optional<double> R;
  /// Sobolev exponent of the cut-off and of the H^r diagnostic and guard.
  double r = 0.3;
  /// Extra constant drift on top of the conserved mean.
  Vec3 w{0, 0, 0};
  /// Integrability exponent for the B^{gamma(1-2/p)}_{2,p} diagnostic.
  double p = 4.0;
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::euler;
  /// Extra Laplacian damping of deterministic runs: none, mu (viscous) or
  /// 3 mu / 5 (effective).
  Viscosity viscosity = Viscosity::effective;
  bool nonlinearity = true;
  int record_every = 10;
  /// Blow-up proxy: stop once ||v||_{H^r} >= guard. Defaults to 10 R when R
  /// is set, otherwise no guard.
  std::optional<double> guard;
  /// Largest accepted CFL number dt 2 pi K max_x |phi v(x) + drift| of the
  /// explicitly treated transport.
  double growth_bound = 1.0;
  /// Largest accepted dt * (spectral radius of the corrector).
  double stability_bound = 1.0;
  std::vector<double> snapshot_times;

  std::uint64_t steps() const;
  double effective_guard() const;

  nlohmann::json to_json() const;
  static SimConfig from_json(const nlohmann::json& j);
};

/// Throws ValidationError naming the violated rule. With scaling_window the
/// exponent window 5/2 - 2 gamma < r < gamma (1 - 2/p), p > p_c is enforced.
void validate(const SimConfig& cfg, bool scaling_window = false);

struct Sample {
  double t;
  double l2;
  double hr;
  double hgamma;
  double besov;
  double energy_defect;
  double cutoff_factor;
};

struct TrajectoryRecord {
  std::vector<Sample> samples;
  bool blowup = false;
  std::uint64_t steps_taken = 0;
  Mode mode = Mode::deterministic;
  std::uint64_t sample_index = 0;
  double gamma = 0.0;
  double p = 0.0;
  std::vector<std::pair<double, SpectralField>> snapshots;
  std::optional<SpectralField> final_field;  // u(T) including the mean
};

/// Fixed CSV column order.
inline constexpr const char* kTrajectoryColumns =
    "t,L2,Hr,Hgamma,Besov,energy_defect,cutoff_factor";

void write_trajectory_csv(const TrajectoryRecord& rec, const std::filesystem::path& path);
nlohmann::json run_metadata(const SimConfig& cfg, const std::string& kind);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

/// P[div(v (x) v)] by physical-space products, dealiased.
SpectralField nonlinearity(const SpectralField& v, FftEngine* fft = nullptr);

/// Smooth step: 1 on (-inf, 1], 0 on [2, inf), and on (1, 2)
/// g(2 - x) / (g(2 - x) + g(x - 1)) with g(t) = exp(-1/t).
double bump(double x);
double cutoff_factor(const SpectralField& v, double R, double r);

/// Immutable per-configuration data shared by all workers: grid, noise,
/// corrector table, linear propagators and norm weights.
class Model {
 public:
  explicit Model(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  const Grid& grid() const { return grid_; }
  const ThetaSpectrum& theta() const { return theta_; }
  bool has_noise() const { return !theta_.empty(); }
  const NoiseBasis* basis() const { return basis_ ? &*basis_ : nullptr; }
  const Corrector* corrector() const { return corrector_ ? &*corrector_ : nullptr; }
  const BrownianDriver& driver() const { return driver_; }

  struct Linear {
    std::vector<double> lambda;  // |k|^{2 gamma} + mu_eff (2 pi)^2 |k|^2, 0 off-band
    std::vector<double> decay;   // exp(-dt lambda) on the band, 0 off-band
    std::vector<double> loss;    // (1 - exp(-2 dt lambda)) / 2
  };
  /// Stochastic modes use mu_eff = 0; deterministic ones follow cfg.viscosity.
  const Linear& linear(Mode mode) const;
  double mu_eff(Mode mode) const;

  const std::vector<double>& hr_weights() const { return hr_; }
  const std::vector<double>& hgamma_weights() const { return hgamma_; }

 private:
  SimConfig cfg_;
  Grid grid_;
  ThetaSpectrum theta_;
  std::optional<NoiseBasis> basis_;
  std::optional<Corrector> corrector_;
  BrownianDriver driver_;
  Linear det_, sto_;
  std::vector<double> hr_, hgamma_;
};

struct StepReport {
  double dissipation = 0.0;  // energy removed by the linear part this step
  double growth = 0.0;       // CFL number of the step
  double phi = 1.0;          // cut-off factor used
};

/// Per-worker integrator state (FFT plans and scratch).
class Stepper {
 public:
  explicit Stepper(std::shared_ptr<const Model> model);

  const Model& model() const { return *model_; }

  /// One step of v (mean-zero part) with constant drift `drift`. Noise
  /// increments are required for the stochastic modes and ignored otherwise.
  StepReport step(SpectralField& v, const Vec3& drift, Mode mode, const NoiseIncrements* inc,
                  std::uint64_t step_index);

 private:
  // out = P[div(v (x) Y)] with Y = a * x + b * v - c * drift, one pass.
  void advect(const SpectralField& v, const SpectralField* x, double a, double b, double c,
              const Vec3& drift, SpectralField& out);
  void load(const SpectralField& f, std::vector<double>& phys);
  StepReport step_euler(SpectralField& v, const Vec3& drift, Mode mode, const NoiseIncrements* inc,
                        std::uint64_t step_index);
  StepReport step_heun(SpectralField& v, const Vec3& drift, Mode mode, const NoiseIncrements* inc,
                       std::uint64_t step_index);
  StepReport step_midpoint(SpectralField& v, const Vec3& drift, Mode mode,
                           const NoiseIncrements* inc, std::uint64_t step_index);
  double phi_for(const SpectralField& v, Mode mode) const;
  double cfl(double phi, const Vec3& drift) const;

  std::shared_ptr<const Model> model_;
  FftEngine fft_;
  std::vector<double> vp_, xp_, yp_, prod_;
  SpectralField noise_velocity_, tmp_, work_, stage_;
};

/// Convenience single steps (each builds its own Model).
SpectralField step_deterministic(const SpectralField& v, const SimConfig& cfg);
SpectralField step_stochastic(const SpectralField& v, const SimConfig& cfg,
                              const NoiseIncrements& inc);

/// Called at every recorded sample with the time and the mean-free field.
using SampleObserver = std::function<void(double t, const SpectralField& v)>;

/// Marches u0 from 0 to T. Sample `sample_index` selects the Brownian
/// stream. Pass a prebuilt model to share it between samples.
TrajectoryRecord integrate(const SimConfig& cfg, const SpectralField& u0, Mode mode,
                           std::uint64_t sample_index = 0,
                           std::shared_ptr<const Model> model = nullptr,
                           const SampleObserver& observer = {});

struct RegularitySummary {
  double hgamma_p_integral;  // int_0^T ||v||_{H^gamma}^p dt (trapezoid)
  double besov_sup;          // sup_t ||v||_{B^{gamma(1-2/p)}_{2,p}}
};

RegularitySummary regularity_functionals(const TrajectoryRecord& rec, double p, double gamma);

struct CriticalExponents {
  double delta;     // 5/2 - 2 gamma
  double p_crit;    // 4 gamma / (6 gamma - 5)
  double beta;      // 5/4 - gamma / 2
  double gamma;
  double beta0(double p) const { return gamma * (1.0 - 1.0 / p); }
};

CriticalExponents critical_exponents(double gamma);

}  // namespace tnsim
