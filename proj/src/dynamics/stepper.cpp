#include <cmath>
#include <stdexcept>

#include "internal.hpp"
#include "tnsim/kernels.hpp"

namespace tnsim {
namespace {

constexpr int kMaxMidpointIterations = 60;
constexpr double kMidpointTolerance = 1e-13;

double energy(const SpectralField& f, const std::vector<double>& w) {
  const auto& k = kernels::active();
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) acc += k.weighted_energy(f.component(c), w.data(), w.size());
  return acc;
}

void scale(SpectralField& f, const std::vector<double>& s) {
  const auto& k = kernels::active();
  for (int c = 0; c < 3; ++c) k.scale_real(f.component(c), s.data(), s.size());
}

}  // namespace

Stepper::Stepper(std::shared_ptr<const Model> model)
    : model_(std::move(model)),
      fft_(model_->grid()),
      noise_velocity_(model_->grid()),
      tmp_(model_->grid()),
      work_(model_->grid()),
      stage_(model_->grid()) {
  const std::size_t np = model_->grid().physical_size();
  vp_.resize(3 * np);
  xp_.resize(3 * np);
  yp_.resize(np);
  prod_.resize(np);
}

void Stepper::load(const SpectralField& f, std::vector<double>& phys) {
  const std::size_t np = model_->grid().physical_size();
  for (int c = 0; c < 3; ++c) fft_.to_physical(f.component(c), phys.data() + c * np);
}

void Stepper::advect(const SpectralField& v, const SpectralField* x, double a, double b, double c,
                     const Vec3& drift, SpectralField& out) {
  const Grid& g = model_->grid();
  const std::size_t np = g.physical_size();
  const auto& kt = kernels::active();
  const auto& t = g.tables();
  const double* sym[3] = {t.kx.data(), t.ky.data(), t.kz.data()};

  load(v, vp_);
  const bool with_x = x != nullptr && a != 0.0;
  if (with_x) load(*x, xp_);
  out.set_zero();
  tmp_.set_zero();
  for (int l = 0; l < 3; ++l) {
    const double* xl = (with_x ? xp_.data() : vp_.data()) + l * np;
    kt.axpbyc(yp_.data(), with_x ? a : 0.0, xl, b, vp_.data() + l * np, -c * drift[l], np);
    for (int i = 0; i < 3; ++i) {
      kt.multiply(prod_.data(), vp_.data() + i * np, yp_.data(), np);
      fft_.from_physical(prod_.data(), tmp_.component(0));
      kt.axpy_imag_symbol(out.component(i), kTwoPi, sym[l], tmp_.component(0), g.size());
    }
  }
  kt.leray_project(out.component(0), out.component(1), out.component(2), t.kx.data(),
                   t.ky.data(), t.kz.data(), t.inv_k2.data(), g.size());
}

double Stepper::cfl(double phi, const Vec3& drift) const {
  // dt * 2 pi K * max_x |phi v(x) + drift|, from the values left in vp_.
  const Grid& g = model_->grid();
  const std::size_t np = g.physical_size();
  double m = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double y = phi * vp_[c * np + p] + drift[c];
      s += y * y;
    }
    m = std::max(m, s);
  }
  return model_->config().dt * kTwoPi * g.cutoff() * std::sqrt(m);
}

double Stepper::phi_for(const SpectralField& v, Mode mode) const {
  const SimConfig& cfg = model_->config();
  if (mode != Mode::stochastic_cutoff) return 1.0;
  if (!cfg.R) throw ValidationError("cutoff", "stochastic-cutoff runs need R");
  return bump(weighted_norm(v, model_->hr_weights()) / *cfg.R);
}

StepReport Stepper::step(SpectralField& v, const Vec3& drift, Mode mode,
                         const NoiseIncrements* inc, std::uint64_t step_index) {
  if (!(v.grid() == model_->grid())) throw std::invalid_argument("field grid differs from model");
  const bool noisy = mode != Mode::deterministic && model_->has_noise();
  if (noisy) {
    if (inc == nullptr) throw std::invalid_argument("stochastic step needs noise increments");
    if (inc->dw.size() != model_->theta().positive().size()) {
      throw std::invalid_argument("increment count does not match the theta support");
    }
    noise_velocity_ = noise_velocity_field(model_->grid(), model_->theta(), *model_->basis(), *inc);
  }
  const NoiseIncrements* used = noisy ? inc : nullptr;
  switch (model_->config().scheme) {
    case Scheme::euler: return step_euler(v, drift, mode, used, step_index);
    case Scheme::heun: return step_heun(v, drift, mode, used, step_index);
    case Scheme::midpoint: return step_midpoint(v, drift, mode, used, step_index);
  }
  return {};
}

StepReport Stepper::step_euler(SpectralField& v, const Vec3& drift, Mode mode,
                               const NoiseIncrements* inc, std::uint64_t step_index) {
  const SimConfig& cfg = model_->config();
  const Model::Linear& lin = model_->linear(mode);
  StepReport rep;
  rep.phi = phi_for(v, mode);
  const double b = cfg.nonlinearity ? -cfg.dt * rep.phi : 0.0;
  const double a = inc != nullptr ? std::sqrt(1.5 * cfg.mu) : 0.0;
  // Fused: sqrt(3 mu / 2) P[(dX . grad) v] - dt phi P[(v . grad) v] - dt (drift . grad) v.
  advect(v, inc != nullptr ? &noise_velocity_ : nullptr, a, b, cfg.dt, drift, work_);
  rep.growth = cfl(cfg.nonlinearity ? rep.phi : 0.0, drift);
  if (rep.growth > cfg.growth_bound) {
    throw StepRejected(step_index, "CFL number " + std::to_string(rep.growth) + " exceeds " +
                                       std::to_string(cfg.growth_bound));
  }
  if (inc != nullptr) model_->corrector()->accumulate(work_, cfg.dt, v);
  v += work_;
  rep.dissipation = energy(v, lin.loss);
  scale(v, lin.decay);
  return rep;
}

StepReport Stepper::step_heun(SpectralField& v, const Vec3& drift, Mode mode,
                              const NoiseIncrements* inc, std::uint64_t step_index) {
  // Lawson-Heun in the drift, Euler-Maruyama in the noise:
  //   s = E (v + D(v) + S),  v' = E (v + D(v)/2 + S) + D(s)/2,
  // where E = exp(-dt lambda), D the explicit convection-drift increment and
  // S the noise increment plus dt P_theta v.
  const SimConfig& cfg = model_->config();
  const Model::Linear& lin = model_->linear(mode);
  StepReport rep;
  rep.phi = phi_for(v, mode);
  const double b = cfg.nonlinearity ? -cfg.dt * rep.phi : 0.0;
  const double q0 = energy(v, lin.lambda);

  advect(v, nullptr, 0.0, b, cfg.dt, drift, work_);  // D(v)
  rep.growth = cfl(cfg.nonlinearity ? rep.phi : 0.0, drift);
  if (rep.growth > cfg.growth_bound) {
    throw StepRejected(step_index, "CFL number " + std::to_string(rep.growth) + " exceeds " +
                                       std::to_string(cfg.growth_bound));
  }
  SpectralField base = v;
  if (inc != nullptr) {
    advect(v, &noise_velocity_, std::sqrt(1.5 * cfg.mu), 0.0, 0.0, drift, stage_);
    base += stage_;
    model_->corrector()->accumulate(base, cfg.dt, v);
  }
  stage_ = base;
  stage_ += work_;
  scale(stage_, lin.decay);  // s
  base.axpy(0.5, work_);
  scale(base, lin.decay);
  advect(stage_, nullptr, 0.0, b, cfg.dt, drift, work_);  // D(s)
  base.axpy(0.5, work_);
  v = std::move(base);
  rep.dissipation = 0.5 * cfg.dt * (q0 + energy(v, lin.lambda));
  return rep;
}

StepReport Stepper::step_midpoint(SpectralField& v, const Vec3& drift, Mode mode,
                                  const NoiseIncrements* inc, std::uint64_t step_index) {
  // Convection and drift by the implicit midpoint rule
  //   m = v + (dt/2) F(m),  C = dt F(m),
  // solved by fixed-point iteration. <F(m), m> = 0 makes ||v + C|| = ||v||.
  const SimConfig& cfg = model_->config();
  const Model::Linear& lin = model_->linear(mode);
  StepReport rep;
  rep.phi = phi_for(v, mode);
  const double b = cfg.nonlinearity ? -0.5 * cfg.dt * rep.phi : 0.0;

  SpectralField m = v;
  const double scale_ref = std::max(l2_norm(v), 1e-300);
  bool converged = false;
  for (int it = 0; it < kMaxMidpointIterations; ++it) {
    advect(m, nullptr, 0.0, b, 0.5 * cfg.dt, drift, work_);
    if (it == 0) {
      rep.growth = cfl(cfg.nonlinearity ? rep.phi : 0.0, drift);
      if (rep.growth > cfg.growth_bound) {
        throw StepRejected(step_index, "CFL number " + std::to_string(rep.growth) + " exceeds " +
                                           std::to_string(cfg.growth_bound));
      }
    }
    stage_ = v;
    stage_ += work_;
    m -= stage_;
    const double change = l2_norm(m);
    m = stage_;
    if (change <= kMidpointTolerance * scale_ref) {
      converged = true;
      break;
    }
  }
  if (!converged) throw StepRejected(step_index, "implicit midpoint iteration did not converge");

  SpectralField inc_field = 2.0 * work_;
  if (inc != nullptr) {
    advect(v, &noise_velocity_, std::sqrt(1.5 * cfg.mu), 0.0, 0.0, drift, stage_);
    inc_field += stage_;
    model_->corrector()->accumulate(inc_field, cfg.dt, v);
  }
  v += inc_field;
  rep.dissipation = energy(v, lin.loss);
  scale(v, lin.decay);
  return rep;
}

SpectralField step_deterministic(const SpectralField& v, const SimConfig& cfg) {
  auto model = std::make_shared<const Model>(cfg);
  Stepper s(model);
  SpectralField out = v;
  s.step(out, cfg.w, Mode::deterministic, nullptr, 0);
  return out;
}

SpectralField step_stochastic(const SpectralField& v, const SimConfig& cfg,
                              const NoiseIncrements& inc) {
  auto model = std::make_shared<const Model>(cfg);
  Stepper s(model);
  SpectralField out = v;
  s.step(out, cfg.w, Mode::stochastic, &inc, 0);
  return out;
}

}  // namespace tnsim
