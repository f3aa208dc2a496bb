#include <cmath>
#include <stdexcept>

#include "internal.hpp"

namespace tnsim {
namespace {

Model::Linear make_linear(const Grid& g, double gamma, double mu_eff, double dt) {
  const auto& t = g.tables();
  Model::Linear l;
  l.lambda.assign(g.size(), 0.0);
  l.decay.assign(g.size(), 0.0);
  l.loss.assign(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (t.band[i] == 0.0) continue;
    const double k2 = t.k2[i];
    const double lam = std::pow(k2, gamma) + mu_eff * kTwoPi * kTwoPi * k2;
    l.lambda[i] = lam;
    l.decay[i] = std::exp(-dt * lam);
    l.loss[i] = -0.5 * std::expm1(-2.0 * dt * lam);
  }
  return l;
}

}  // namespace

SpectralField nonlinearity(const SpectralField& v, FftEngine* fft) {
  if (v.divergence_residual() > 1e-10) {
    throw std::invalid_argument("nonlinearity needs a divergence-free field");
  }
  if (v.out_of_band_max() != 0.0) {
    throw std::invalid_argument("nonlinearity needs a field inside the dealias band");
  }
  std::unique_ptr<FftEngine> own;
  if (fft == nullptr) {
    own = std::make_unique<FftEngine>(v.grid());
    fft = own.get();
  }
  return transport_by(v, v, *fft);
}

double bump(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - x));
  const double b = std::exp(-1.0 / (x - 1.0));
  return a / (a + b);
}

double cutoff_factor(const SpectralField& v, double R, double r) {
  if (!(R > 0.0)) throw std::invalid_argument("cut-off radius must be positive");
  return bump(sobolev_norm(v, r) / R);
}

Model::Model(SimConfig cfg)
    : cfg_(std::move(cfg)), grid_(cfg_.N), driver_(cfg_.seed, 0) {
  detail::validate_static(cfg_, false);
  theta_ = cfg_.theta.build();
  if (!theta_.empty()) {
    basis_ = NoiseBasis::build(theta_.max_component());
    corrector_.emplace(grid_, theta_, *basis_, cfg_.mu);
    detail::validate_stability(cfg_, corrector_->spectral_radius());
  }
  driver_ = BrownianDriver(cfg_.seed, theta_.positive().size());
  det_ = make_linear(grid_, cfg_.gamma, mu_eff(Mode::deterministic), cfg_.dt);
  sto_ = make_linear(grid_, cfg_.gamma, mu_eff(Mode::stochastic), cfg_.dt);
  hr_ = sobolev_weights(grid_, cfg_.r);
  hgamma_ = sobolev_weights(grid_, cfg_.gamma);
}

const Model::Linear& Model::linear(Mode mode) const {
  return mode == Mode::deterministic ? det_ : sto_;
}

double Model::mu_eff(Mode mode) const {
  if (mode != Mode::deterministic) return 0.0;
  switch (cfg_.viscosity) {
    case Viscosity::none: return 0.0;
    case Viscosity::viscous: return cfg_.mu;
    case Viscosity::effective: return 0.6 * cfg_.mu;
  }
  return 0.0;
}

}  // namespace tnsim
