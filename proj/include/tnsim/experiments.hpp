#pragma once

// Scenario runners: sweep a SimConfig over shells, viscosities or time steps,
// fan Monte Carlo samples out to a worker pool, and persist the rows plus a
// JSON sidecar. Every row is a pure function of (spec, sweep point, sample
// index), so results do not depend on the worker count.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tnsim/dynamics.hpp"

namespace tnsim {

enum class ExperimentKind { corrector_convergence, energy_audit, decay, scaling_limit, survival };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::decay;
  SimConfig sim;
  /// Sweeps. Left empty in a config file they default to the single value
  /// carried by `sim` (its shell n, mu, dt).
  std::vector<int> n_values;
  std::vector<double> mu_values;
  std::vector<double> dt_values;
  int samples = 8;
  std::filesystem::path outdir = ".";
  /// Output files are <outdir>/<kind>-<tag>.csv and .meta.json.
  std::string tag = "run";
  /// Random initial data (divergence-free, mean zero, band-limited).
  RandomFieldOptions init;
  /// corrector-convergence: the test modes j.
  std::vector<Wavevector> modes{{1, 0, 0}};
  /// scaling-limit: distance exponent r0.
  double r0 = 0.4;
  /// scaling-limit: set R to the largest H^r norm along the deterministic
  /// run, so the cut-off is identically one there.
  bool cutoff_auto = false;

  nlohmann::json to_json() const;
  /// Strict: unknown keys are a ValidationError.
  static ExperimentSpec from_json(const nlohmann::json& j);
};

/// Throws ValidationError naming the violated rule. Validates every SimConfig
/// the sweep will build.
void validate(const ExperimentSpec& spec);

/// Rows keyed by sweep point and sample index. `columns` lists the key
/// columns, then "sample", then the outcome columns.
struct ResultTable {
  ExperimentKind kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Per-group statistics and kind-specific results (slopes, orders,
  /// controls, intervals).
  nlohmann::json summary;
};

struct RunOptions {
  /// 0: TNSIM_WORKERS if set, else the hardware concurrency.
  int workers = 0;
};

int resolve_workers(int requested);

/// Runs fn(i) for i in [0, count) on a bounded pool. The first exception
/// (lowest index) is rethrown after all workers stop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

ResultTable run_corrector_convergence(const ExperimentSpec& spec, const RunOptions& opt = {});
ResultTable run_energy_audit(const ExperimentSpec& spec, const RunOptions& opt = {});
ResultTable run_decay(const ExperimentSpec& spec, const RunOptions& opt = {});
ResultTable run_scaling_limit(const ExperimentSpec& spec, const RunOptions& opt = {});
ResultTable run_survival(const ExperimentSpec& spec, const RunOptions& opt = {});
ResultTable run_experiment(const ExperimentSpec& spec, const RunOptions& opt = {});

struct OutputPaths {
  std::filesystem::path csv, summary_csv, meta;
};

/// Writes <kind>-<tag>.csv (rows), <kind>-<tag>.summary.csv (per-group
/// count, median, q1, q3) and <kind>-<tag>.meta.json.
OutputPaths write_result(const ExperimentSpec& spec, const ResultTable& table);

// Statistics used by the summaries.
/// Linear-interpolation quantile (q in [0, 1]) of unsorted data.
double quantile(std::vector<double> x, double q);
double median(std::vector<double> x);
/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
struct Interval {
  double lo, hi;
};
/// Wilson score interval for `successes` out of `n`, at normal quantile z.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

}  // namespace tnsim
