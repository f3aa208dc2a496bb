#include <cmath>
#include <map>
#include <stdexcept>

#include "internal.hpp"

namespace tnsim {
namespace {

using Json = nlohmann::json;

// Groups rows by their first `nkeys` columns (in row order) and summarises
// `value(row)` per group with count, median and quartiles.
Json quartile_groups(const ResultTable& t, std::size_t nkeys,
                     const std::function<double(const std::vector<double>&)>& value) {
  std::vector<std::vector<double>> keys;
  std::map<std::vector<double>, std::vector<double>> vals;
  for (const auto& r : t.rows) {
    std::vector<double> k(r.begin(), r.begin() + static_cast<long>(nkeys));
    if (!vals.count(k)) keys.push_back(k);
    vals[k].push_back(value(r));
  }
  Json out = Json::array();
  for (const auto& k : keys) {
    const auto& v = vals[k];
    Json key = Json::object();
    for (std::size_t i = 0; i < nkeys; ++i) key[t.columns[i]] = k[i];
    out.push_back({{"key", key},
                   {"stats",
                    {{"count", v.size()},
                     {"median", median(v)},
                     {"q1", quantile(v, 0.25)},
                     {"q3", quantile(v, 0.75)}}}});
  }
  return out;
}

SpectralField initial_field(const ExperimentSpec& s) {
  return random_divergence_free(Grid(s.sim.N), s.init);
}

Vec3 unit_perp(const Wavevector& j) {
  // j x e_3, or j x e_1 when j is parallel to e_3.
  const Vec3 jv{double(j[0]), double(j[1]), double(j[2])};
  Vec3 a = (j[0] == 0 && j[1] == 0) ? Vec3{0, jv[2], -jv[1]} : Vec3{jv[1], -jv[0], 0};
  const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  for (double& x : a) x /= n;
  return a;
}

}  // namespace

ResultTable run_corrector_convergence(const ExperimentSpec& spec, const RunOptions& opt) {
  validate(spec);
  const ExperimentSpec s = detail::with_defaults(spec);
  const double mu = s.mu_values.front();
  const double alpha = s.sim.theta.kind == ThetaChoice::Kind::shell ? s.sim.theta.alpha_decay : 1.0;
  ResultTable t{s.kind, {"n", "j1", "j2", "j3", "sample", "error"}, {}, {}};
  const std::size_t nm = s.modes.size();
  t.rows.resize(s.n_values.size() * nm);
  parallel_for(t.rows.size(), resolve_workers(opt.workers), [&](std::size_t i) {
    const int n = s.n_values[i / nm];
    const Wavevector& j = s.modes[i % nm];
    const Vec3 a = unit_perp(j);
    const double e = corrector_limit_error(j, {a[0], a[1], a[2]}, n, alpha, mu);
    t.rows[i] = {double(n), double(j[0]), double(j[1]), double(j[2]), 0.0, e};
  });

  Json per_mode = Json::array();
  for (std::size_t m = 0; m < nm; ++m) {
    std::vector<double> ns, errs;
    for (std::size_t q = 0; q < s.n_values.size(); ++q) {
      ns.push_back(s.n_values[q]);
      errs.push_back(t.rows[q * nm + m][5]);
    }
    bool decreasing = true;
    for (std::size_t q = 1; q < errs.size(); ++q) decreasing = decreasing && errs[q] < errs[q - 1];
    Json e = {{"j", s.modes[m]},
              {"errors", errs},
              {"strictly_decreasing", decreasing},
              {"first_over_last", errs.front() / errs.back()}};
    e["loglog_slope"] = ns.size() >= 2 ? Json(loglog_slope(ns, errs)) : Json(nullptr);
    per_mode.push_back(e);
  }
  t.summary = {{"mu", mu}, {"alpha_decay", alpha}, {"modes", per_mode},
               {"groups", quartile_groups(t, 4, [](const auto& r) { return r[5]; })}};
  return t;
}

ResultTable run_energy_audit(const ExperimentSpec& spec, const RunOptions& opt) {
  validate(spec);
  const ExperimentSpec s = detail::with_defaults(spec);
  const SpectralField u0 = initial_field(s);
  const auto m = static_cast<std::size_t>(s.samples);
  std::vector<std::shared_ptr<const Model>> models;
  for (double dt : s.dt_values) {
    models.push_back(std::make_shared<const Model>(detail::sweep_config(s, 0, s.sim.mu, dt)));
  }
  ResultTable t{s.kind, {"dt", "sample", "energy_defect"}, {}, {}};
  t.rows.resize(s.dt_values.size() * m);
  const int workers = resolve_workers(opt.workers);
  parallel_for(t.rows.size(), workers, [&](std::size_t i) {
    const auto& model = models[i / m];
    const auto rec = integrate(model->config(), u0, Mode::stochastic, i % m, model);
    t.rows[i] = {model->config().dt, double(i % m), rec.samples.back().energy_defect};
  });

  // theta = 0 control with the energy-conserving convection rule.
  SimConfig control = detail::sweep_config(s, 0, s.sim.mu, s.dt_values.front());
  control.theta = ThetaChoice{};
  control.scheme = Scheme::midpoint;
  const double control_defect =
      integrate(control, u0, Mode::stochastic).samples.back().energy_defect;

  const Json groups = quartile_groups(t, 1, [](const auto& r) { return std::abs(r[2]); });
  std::vector<double> dts, meds;
  for (const auto& g : groups) {
    dts.push_back(g["key"]["dt"].get<double>());
    meds.push_back(g["stats"]["median"].get<double>());
  }
  Json ratios = Json::array(), orders = Json::array();
  for (std::size_t q = 1; q < meds.size(); ++q) {
    ratios.push_back(meds[q - 1] / meds[q]);
    orders.push_back(std::log(meds[q - 1] / meds[q]) / std::log(dts[q - 1] / dts[q]));
  }
  t.summary = {{"statistic", "abs(energy_defect)"},
               {"groups", groups},
               {"median_ratios", ratios},
               {"observed_orders", orders},
               {"control_defect", control_defect},
               {"control_scheme", "midpoint"}};
  t.summary["fitted_order"] = dts.size() >= 2 ? Json(loglog_slope(dts, meds)) : Json(nullptr);
  return t;
}

ResultTable run_decay(const ExperimentSpec& spec, const RunOptions& opt) {
  validate(spec);
  const ExperimentSpec s = detail::with_defaults(spec);
  const SpectralField u0 = initial_field(s);
  const auto model = std::make_shared<const Model>(s.sim);
  const auto m = static_cast<std::size_t>(s.samples);
  std::vector<std::vector<std::vector<double>>> per(m);
  parallel_for(m, resolve_workers(opt.workers), [&](std::size_t i) {
    const auto rec = integrate(s.sim, u0, Mode::stochastic, i, model);
    const double e0 = rec.samples.front().l2 * rec.samples.front().l2;
    for (const Sample& x : rec.samples) {
      const double ratio = e0 > 0.0 ? x.l2 * x.l2 * std::exp(x.t) / e0 : 0.0;
      per[i].push_back({x.t, double(i), ratio});
    }
  });
  ResultTable t{s.kind, {"t", "sample", "ratio"}, {}, {}};
  // Rows ordered by time, then sample.
  std::size_t len = 0;
  for (const auto& p : per) len = std::max(len, p.size());
  double worst = 0.0;
  for (std::size_t q = 0; q < len; ++q) {
    for (const auto& p : per) {
      if (q < p.size()) {
        t.rows.push_back(p[q]);
        worst = std::max(worst, p[q][2]);
      }
    }
  }
  t.summary = {{"max_ratio", worst},
               {"groups", quartile_groups(t, 1, [](const auto& r) { return r[2]; })}};
  return t;
}

ResultTable run_scaling_limit(const ExperimentSpec& spec, const RunOptions& opt) {
  validate(spec);
  const ExperimentSpec s = detail::with_defaults(spec);
  const SpectralField u0 = initial_field(s);
  const Grid g(s.sim.N);
  const std::vector<double> w_r0 = sobolev_weights(g, s.r0);
  const auto m = static_cast<std::size_t>(s.samples);
  const int workers = resolve_workers(opt.workers);

  // One deterministic effective-viscosity reference per mu.
  struct Reference {
    std::vector<SpectralField> fields;
    double R;
  };
  std::vector<Reference> refs(s.mu_values.size());
  parallel_for(refs.size(), workers, [&](std::size_t i) {
    SimConfig c = s.sim;
    c.mu = s.mu_values[i];
    c.theta = ThetaChoice{};
    c.viscosity = Viscosity::effective;
    c.guard.reset();
    if (s.cutoff_auto) c.R.reset();
    std::vector<SpectralField> fields;
    const auto rec = integrate(c, u0, Mode::deterministic, 0, nullptr,
                               [&](double, const SpectralField& v) { fields.push_back(v); });
    double hr_max = 0.0;
    for (const Sample& x : rec.samples) hr_max = std::max(hr_max, x.hr);
    refs[i] = {std::move(fields), s.cutoff_auto ? hr_max : *s.sim.R};
  });

  const std::size_t nmu = s.mu_values.size();
  std::vector<std::shared_ptr<const Model>> models;
  for (int n : s.n_values) {
    for (std::size_t q = 0; q < nmu; ++q) {
      SimConfig c = detail::sweep_config(s, n, s.mu_values[q], s.sim.dt);
      c.R = refs[q].R;
      models.push_back(std::make_shared<const Model>(c));
    }
  }
  ResultTable t{s.kind, {"n", "mu", "sample", "sup_distance", "blowup"}, {}, {}};
  t.rows.resize(models.size() * m);
  parallel_for(t.rows.size(), workers, [&](std::size_t i) {
    const std::size_t point = i / m;
    const auto& model = models[point];
    const Reference& ref = refs[point % nmu];
    std::size_t k = 0;
    double sup = 0.0;
    const auto rec = integrate(model->config(), u0, Mode::stochastic_cutoff, i % m, model,
                               [&](double, const SpectralField& v) {
                                 if (k < ref.fields.size()) {
                                   sup = std::max(sup, weighted_norm(v - ref.fields[k], w_r0));
                                 }
                                 ++k;
                               });
    t.rows[i] = {double(model->config().theta.n), model->config().mu, double(i % m), sup,
                 rec.blowup ? 1.0 : 0.0};
  });

  const Json groups = quartile_groups(t, 2, [](const auto& r) { return r[3]; });
  Json trend = Json::array();
  for (std::size_t q = 0; q < nmu; ++q) {
    std::vector<double> meds;
    for (std::size_t p = 0; p < s.n_values.size(); ++p) {
      meds.push_back(groups[p * nmu + q]["stats"]["median"].get<double>());
    }
    bool decreasing = true;
    for (std::size_t p = 1; p < meds.size(); ++p) decreasing = decreasing && meds[p] < meds[p - 1];
    trend.push_back({{"mu", s.mu_values[q]},
                     {"R", refs[q].R},
                     {"n_values", s.n_values},
                     {"medians", meds},
                     {"strictly_decreasing", decreasing}});
  }
  t.summary = {{"r0", s.r0}, {"groups", groups}, {"trend", trend}};
  return t;
}

ResultTable run_survival(const ExperimentSpec& spec, const RunOptions& opt) {
  validate(spec);
  const ExperimentSpec s = detail::with_defaults(spec);
  const SpectralField u0 = initial_field(s);
  const auto m = static_cast<std::size_t>(s.samples);
  std::vector<std::shared_ptr<const Model>> models;
  for (int n : s.n_values) {
    for (double mu : s.mu_values) {
      models.push_back(std::make_shared<const Model>(detail::sweep_config(s, n, mu, s.sim.dt)));
    }
  }
  ResultTable t{s.kind, {"n", "mu", "sample", "survived"}, {}, {}};
  t.rows.resize(models.size() * m);
  parallel_for(t.rows.size(), resolve_workers(opt.workers), [&](std::size_t i) {
    const auto& model = models[i / m];
    const auto rec = integrate(model->config(), u0, Mode::stochastic, i % m, model);
    t.rows[i] = {double(model->config().theta.n), model->config().mu, double(i % m),
                 rec.blowup ? 0.0 : 1.0};
  });
  Json groups = Json::array();
  for (std::size_t p = 0; p < models.size(); ++p) {
    std::size_t alive = 0;
    for (std::size_t q = 0; q < m; ++q) alive += t.rows[p * m + q][3] > 0.5 ? 1 : 0;
    const Interval ci = wilson_interval(alive, m);
    groups.push_back({{"key", {{"n", t.rows[p * m][0]}, {"mu", t.rows[p * m][1]}}},
                      {"stats",
                       {{"count", m},
                        {"frequency", double(alive) / double(m)},
                        {"wilson_lo", ci.lo},
                        {"wilson_hi", ci.hi}}}});
  }
  t.summary = {{"guard", *s.sim.guard}, {"confidence", 0.95}, {"groups", groups}};
  return t;
}

ResultTable run_experiment(const ExperimentSpec& spec, const RunOptions& opt) {
  switch (spec.kind) {
    case ExperimentKind::corrector_convergence: return run_corrector_convergence(spec, opt);
    case ExperimentKind::energy_audit: return run_energy_audit(spec, opt);
    case ExperimentKind::decay: return run_decay(spec, opt);
    case ExperimentKind::scaling_limit: return run_scaling_limit(spec, opt);
    case ExperimentKind::survival: return run_survival(spec, opt);
  }
  throw std::logic_error("unhandled experiment kind");
}

}  // namespace tnsim
