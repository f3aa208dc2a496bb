#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tnsim/experiments.hpp"

using namespace tnsim;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentSpec small_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  s.sim.N = 16;
  s.sim.dt = 1e-3;
  s.sim.T = 0.01;
  s.sim.mu = 0.05;
  s.sim.theta.kind = ThetaChoice::Kind::shell;
  s.sim.theta.n = 1;
  s.sim.record_every = 5;
  s.samples = 3;
  s.init.k_max = 4;
  s.outdir = std::filesystem::temp_directory_path() / "tnsim_test_experiments";
  return s;
}

std::string rule_of(const ExperimentSpec& s) {
  try {
    validate(s);
  } catch (const ValidationError& e) {
    return e.rule();
  }
  return "ok";
}

}  // namespace

TEST_CASE("statistics") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
  CHECK(quantile({10, 20}, 0.75) == 17.5);
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  CHECK(loglog_slope({1, 2, 4, 8}, {3, 0.75, 0.1875, 0.046875}) == doctest::Approx(-2.0));
  // Wilson 95% interval for 0/10 and 10/10: upper (lower) bound 0.2775 (0.7225).
  const Interval a = wilson_interval(0, 10);
  CHECK(a.lo == 0.0);
  CHECK(a.hi == doctest::Approx(0.27754).epsilon(1e-4));
  const Interval b = wilson_interval(10, 10);
  CHECK(b.hi == doctest::Approx(1.0));
  CHECK(b.lo == doctest::Approx(0.72246).epsilon(1e-4));
  const Interval c = wilson_interval(5, 10);
  CHECK(c.lo + c.hi == doctest::Approx(1.0));
}

TEST_CASE("worker pool") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK(resolve_workers(5) == 5);
  ::setenv("TNSIM_WORKERS", "3", 1);
  CHECK(resolve_workers(0) == 3);
  ::setenv("TNSIM_WORKERS", "zero", 1);
  CHECK_THROWS_AS(resolve_workers(0), ValidationError);
  ::unsetenv("TNSIM_WORKERS");
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("experiment spec") {
  SUBCASE("json round trip") {
    ExperimentSpec s = small_spec(ExperimentKind::scaling_limit);
    s.n_values = {1, 2};
    s.mu_values = {0.1};
    s.cutoff_auto = true;
    const auto back = ExperimentSpec::from_json(nlohmann::json::parse(s.to_json().dump()));
    CHECK(back.to_json() == s.to_json());
  }
  SUBCASE("strict keys") {
    CHECK_THROWS_AS(ExperimentSpec::from_json({{"kind", "decay"}, {"sample", 3}}), ValidationError);
    CHECK_THROWS_AS(ExperimentSpec::from_json({{"kind", "nope"}}), ValidationError);
  }
  SUBCASE("rules") {
    ExperimentSpec s = small_spec(ExperimentKind::decay);
    CHECK(rule_of(s) == "ok");
    s.samples = 0;
    CHECK(rule_of(s) == "samples");
    s = small_spec(ExperimentKind::energy_audit);
    s.sim.theta = ThetaChoice{};
    CHECK(rule_of(s) == "energy-audit");
    s = small_spec(ExperimentKind::energy_audit);
    s.dt_values = {1e-3, 3e-3};
    CHECK(rule_of(s) == "horizon");
    s = small_spec(ExperimentKind::survival);
    CHECK(rule_of(s) == "guard");
    s.sim.guard = 10.0;
    CHECK(rule_of(s) == "ok");
    s.sim.R = 1.0;
    CHECK(rule_of(s) == "survival");
    s = small_spec(ExperimentKind::scaling_limit);
    CHECK(rule_of(s) == "cutoff");
    s.cutoff_auto = true;
    CHECK(rule_of(s) == "ok");
    s.n_values = {1, 2};  // n = 2 needs N / 3 >= 6
    CHECK(rule_of(s) == "noise-grid");
    s.n_values = {1};
    s.sim.r = 0.2;
    CHECK(rule_of(s) == "scaling-window");
    s = small_spec(ExperimentKind::corrector_convergence);
    s.modes = {{2, 0, 0}};
    CHECK(rule_of(s) == "corrector-modes");
  }
}

TEST_CASE("corrector convergence runner") {
  ExperimentSpec s = small_spec(ExperimentKind::corrector_convergence);
  s.n_values = {2, 4, 8, 16};
  s.mu_values = {1.0};
  s.modes = {{1, 0, 0}, {0, 1, 0}};
  const ResultTable t = run_corrector_convergence(s);
  REQUIRE(t.rows.size() == 8);
  for (std::size_t q = 0; q < 4; ++q) {
    // Lattice symmetry: j = e_1 and j = e_2 give the same error.
    CHECK(t.rows[2 * q][5] == doctest::Approx(t.rows[2 * q + 1][5]).epsilon(1e-12));
    // Against a direct call of the lattice sum.
    CHECK(t.rows[2 * q][5] == corrector_limit_error({1, 0, 0}, {0, 1, 0}, s.n_values[q], 1.0, 1.0));
  }
  for (const auto& m : t.summary["modes"]) CHECK(m["strictly_decreasing"] == true);
  const double slope = t.summary["modes"][0]["loglog_slope"].get<double>();
  std::vector<double> ns{2, 4, 8, 16}, es;
  for (std::size_t q = 0; q < 4; ++q) es.push_back(t.rows[2 * q][5]);
  CHECK(slope == doctest::Approx(loglog_slope(ns, es)).epsilon(1e-14));
  CHECK(slope < 0.0);
}

TEST_CASE("energy audit runner") {
  ExperimentSpec s = small_spec(ExperimentKind::energy_audit);
  s.dt_values = {1e-3, 5e-4};
  s.samples = 2;
  const ResultTable a = run_energy_audit(s, {1});
  CHECK(a.rows.size() == 4);
  CHECK(std::abs(a.summary["control_defect"].get<double>()) <= 1e-8);
  // Replay with another worker count.
  const ResultTable b = run_energy_audit(s, {3});
  CHECK(a.rows == b.rows);
  // A row reproduced in isolation.
  SimConfig c = s.sim;
  c.dt = 5e-4;
  const auto rec = integrate(c, random_divergence_free(Grid(16), s.init), Mode::stochastic, 1);
  CHECK(a.rows[3][2] == rec.samples.back().energy_defect);
}

TEST_CASE("decay runner") {
  SUBCASE("bounded by one") {
    ExperimentSpec s = small_spec(ExperimentKind::decay);
    s.sim.T = 0.05;
    const ResultTable t = run_decay(s);
    CHECK(t.rows.size() == 3 * 11);
    CHECK(t.summary["max_ratio"].get<double>() <= 1.0 + 1e-12);
  }
  SUBCASE("zero data gives ratio zero") {
    ExperimentSpec s = small_spec(ExperimentKind::decay);
    s.init.l2 = 0.0;
    const ResultTable t = run_decay(s);
    for (const auto& r : t.rows) CHECK(r[2] == 0.0);
  }
  SUBCASE("single unit mode") {
    // |k| = 1 under the linear flow: energy decays as exp(-2t), so the ratio is exp(-t).
    SimConfig c = small_spec(ExperimentKind::decay).sim;
    c.theta = ThetaChoice{};
    c.nonlinearity = false;
    c.T = 0.05;
    const ModeAssignment m{{0, 1, 0}, {0.5, 0, Complex(0, 0.5)}};
    const auto rec = integrate(c, field_from_modes(Grid(16), std::span(&m, 1)), Mode::stochastic);
    const double e0 = rec.samples.front().l2 * rec.samples.front().l2;
    for (const Sample& x : rec.samples) {
      CHECK(x.l2 * x.l2 * std::exp(x.t) / e0 == doctest::Approx(std::exp(-x.t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("scaling-limit runner") {
  ExperimentSpec s = small_spec(ExperimentKind::scaling_limit);
  s.cutoff_auto = true;
  s.samples = 2;
  const ResultTable a = run_scaling_limit(s, {1});
  REQUIRE(a.rows.size() == 2);
  for (const auto& r : a.rows) {
    CHECK(r[3] > 0.0);
    CHECK(r[4] == 0.0);
  }
  const ResultTable b = run_scaling_limit(s, {2});
  CHECK(a.rows == b.rows);
  CHECK(a.summary["trend"][0]["R"].get<double>() > 0.0);
}

TEST_CASE("survival runner") {
  SUBCASE("tiny data survives") {
    ExperimentSpec s = small_spec(ExperimentKind::survival);
    s.sim.guard = 1.0;
    s.init.l2 = 1e-3;
    s.mu_values = {0.02, 0.05};
    const ResultTable t = run_survival(s);
    CHECK(t.rows.size() == 6);
    for (const auto& g : t.summary["groups"]) CHECK(g["stats"]["frequency"] == 1.0);
  }
  SUBCASE("one sample, one step") {
    ExperimentSpec s = small_spec(ExperimentKind::survival);
    s.sim.guard = 1e-6;
    s.sim.T = s.sim.dt;
    s.samples = 1;
    const ResultTable t = run_survival(s);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][3] == 0.0);
  }
}

TEST_CASE("result files") {
  ExperimentSpec s = small_spec(ExperimentKind::energy_audit);
  s.dt_values = {1e-3};
  s.samples = 2;
  s.tag = "w1";
  const OutputPaths p1 = write_result(s, run_energy_audit(s, {1}));
  s.tag = "w8";
  const OutputPaths p8 = write_result(s, run_energy_audit(s, {8}));
  CHECK(p1.csv.filename() == "energy-audit-w1.csv");
  const std::string csv = read_file(p1.csv);
  CHECK(csv == read_file(p8.csv));
  CHECK(csv.substr(0, csv.find('\n')) == "dt,sample,energy_defect");
  const std::string sum = read_file(p1.summary_csv);
  CHECK(sum.substr(0, sum.find('\n')) == "dt,count,median,q1,q3");
  const auto meta = nlohmann::json::parse(read_file(p1.meta));
  CHECK(meta["rows"] == 2);
  CHECK(meta["spec"]["kind"] == "energy-audit");
  std::filesystem::remove_all(s.outdir);
}
