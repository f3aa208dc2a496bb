#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "internal.hpp"
#include "tnsim/kernels.hpp"

#ifndef TNSIM_GIT_REVISION
#define TNSIM_GIT_REVISION "unknown"
#endif

namespace tnsim {
namespace {

SpectralField with_mean(SpectralField v, const Vec3& mean) {
  v.set({0, 0, 0}, {mean[0], mean[1], mean[2]});
  return v;
}

bool finite(const SpectralField& f) { return std::isfinite(l2_norm(f)); }

}  // namespace

TrajectoryRecord integrate(const SimConfig& cfg, const SpectralField& u0, Mode mode,
                           std::uint64_t sample_index, std::shared_ptr<const Model> model,
                           const SampleObserver& observer) {
  if (!model) model = std::make_shared<const Model>(cfg);
  const SimConfig& c = model->config();
  const Grid& g = model->grid();
  if (!(u0.grid() == g)) throw ValidationError("grid", "initial field grid differs from N");
  if (u0.conjugate_asymmetry() > 1e-12) {
    throw ValidationError("initial-data", "initial field is not real (conjugate asymmetry)");
  }
  if (mode == Mode::stochastic_cutoff && !c.R) {
    throw ValidationError("cutoff", "stochastic-cutoff runs need R");
  }

  const Vec3 w0 = mean(u0);
  SpectralField v = subtract_mean(helmholtz_project(dealias(u0)));
  const Vec3 drift{w0[0] + c.w[0], w0[1] + c.w[1], w0[2] + c.w[2]};

  Stepper stepper(model);
  const bool noisy = mode != Mode::deterministic && model->has_noise();
  const double besov_s = c.gamma * (1.0 - 2.0 / c.p);
  const double e0 = 0.5 * l2_norm(v) * l2_norm(v);
  const double guard = c.effective_guard();
  const std::uint64_t steps = c.steps();

  std::vector<std::uint64_t> snap_steps;
  for (double t : c.snapshot_times) {
    snap_steps.push_back(static_cast<std::uint64_t>(std::llround(t / c.dt)));
  }

  TrajectoryRecord rec;
  rec.mode = mode;
  rec.sample_index = sample_index;
  rec.gamma = c.gamma;
  rec.p = c.p;

  double dissipated = 0.0;
  const auto record = [&](std::uint64_t n, double hr) {
    const double l2 = l2_norm(v);
    const double e = 0.5 * l2 * l2;
    Sample s{};
    s.t = static_cast<double>(n) * c.dt;
    s.l2 = l2;
    s.hr = hr;
    s.hgamma = weighted_norm(v, model->hgamma_weights());
    s.besov = besov_norm(v, besov_s, c.p);
    s.energy_defect = e0 > 0.0 ? (e + dissipated - e0) / e0 : 0.0;
    s.cutoff_factor = c.R ? bump(hr / *c.R) : 1.0;
    rec.samples.push_back(s);
    if (observer) observer(s.t, v);
  };
  const auto snapshot = [&](std::uint64_t n) {
    for (std::size_t i = 0; i < snap_steps.size(); ++i) {
      if (snap_steps[i] == n) rec.snapshots.emplace_back(c.snapshot_times[i], with_mean(v, w0));
    }
  };

  double hr = weighted_norm(v, model->hr_weights());
  record(0, hr);
  snapshot(0);
  if (hr >= guard) rec.blowup = true;

  for (std::uint64_t n = 0; n < steps && !rec.blowup; ++n) {
    NoiseIncrements inc;
    if (noisy) inc = model->driver().increments(sample_index, n, c.dt);
    const StepReport r = stepper.step(v, drift, mode, noisy ? &inc : nullptr, n);
    dissipated += r.dissipation;
    if (!finite(v) || !std::isfinite(dissipated)) throw NumericalAbort(n + 1);
    rec.steps_taken = n + 1;
    hr = weighted_norm(v, model->hr_weights());
    if (hr >= guard) rec.blowup = true;
    if ((n + 1) % static_cast<std::uint64_t>(c.record_every) == 0 || n + 1 == steps ||
        rec.blowup) {
      record(n + 1, hr);
    }
    snapshot(n + 1);
  }
  rec.final_field = with_mean(v, w0);
  return rec;
}

RegularitySummary regularity_functionals(const TrajectoryRecord& rec, double p, double gamma) {
  (void)gamma;  // the record already carries the H^gamma and Besov norms
  if (rec.samples.empty()) throw std::invalid_argument("empty trajectory record");
  RegularitySummary s{0.0, 0.0};
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    s.besov_sup = std::max(s.besov_sup, rec.samples[i].besov);
    if (i == 0) continue;
    const double h = rec.samples[i].t - rec.samples[i - 1].t;
    s.hgamma_p_integral +=
        0.5 * h * (std::pow(rec.samples[i - 1].hgamma, p) + std::pow(rec.samples[i].hgamma, p));
  }
  return s;
}

CriticalExponents critical_exponents(double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("critical exponents need gamma > 1");
  }
  return {2.5 - 2.0 * gamma, 4.0 * gamma / (6.0 * gamma - 5.0), 1.25 - 0.5 * gamma, gamma};
}

void write_trajectory_csv(const TrajectoryRecord& rec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kTrajectoryColumns << '\n';
  char buf[512];
  for (const Sample& s : rec.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.l2, s.hr,
                  s.hgamma, s.besov, s.energy_defect, s.cutoff_factor);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json run_metadata(const SimConfig& cfg, const std::string& kind) {
  return {{"kind", kind},
          {"tool", "tnsim"},
          {"revision", TNSIM_GIT_REVISION},
          {"simd", std::string(kernels::to_string(kernels::active().level))},
          {"config", cfg.to_json()},
          {"csv_columns", kTrajectoryColumns}};
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace tnsim
