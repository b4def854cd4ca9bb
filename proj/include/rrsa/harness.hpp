#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrsa/engine.hpp"
#include "rrsa/model.hpp"
#include "rrsa/planner.hpp"
#include "rrsa/schedule.hpp"

namespace rrsa {

enum class Mode { crude, rr };

/// One experiment: a model + schedule, an estimator mode, a budget given
/// either as a target accuracy (resolved through the planner) or explicitly
/// as (n, M), and the repetition/seeding layout.
struct ExperimentConfig {
  GbmModel model;
  double level = 0.7;
  std::optional<double> dh_override;  // pin Dh(theta*) instead of estimating

  StepSchedule schedule;

  Mode mode = Mode::rr;
  int levels = 2;  // R, used in rr mode
  double weak_order = 1.0;

  std::optional<double> epsilon;          // exactly one of epsilon ...
  std::optional<int> explicit_n;          // ... or (n, M)
  std::optional<std::int64_t> explicit_steps;

  int repetitions = 50;
  std::uint64_t base_seed = 0;
  Coupling coupling = Coupling::shared;
  std::string out;        // CSV path; empty = do not write
  double cost_unit = 1.0; // K

  std::optional<double> theta0;     // start value, default model.x0
  std::optional<double> theta_ref;  // root reference, default GBM oracle
  std::optional<int> threads;

  std::optional<double> planner_gamma0;  // default 1/lambda_lower
  double c_tilde = 1.0;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct RunSummary {
  int index = 0;
  std::uint64_t stream_id = 0;
  bool ok = false;
  double estimator = 0.0;
  double abs_error = 0.0;
  std::uint64_t fine_increments = 0;
  double elapsed_seconds = 0.0;
  std::string error;
};

struct ExperimentReport {
  std::vector<RunSummary> runs;  // ordered by run index
  BudgetPlan plan;
  double theta_star = 0.0;
  int repetitions = 0;
  int completed = 0;
  bool partial = false;  // at least one run aborted
  double l1_error = 0.0;
  double l1_std_error = 0.0;
  double mean_elapsed = 0.0;
  std::uint64_t total_fine_increments = 0;
};

/// Planner constants assembled from a configuration, estimating Dh(theta*)
/// with the (n=100, M=1000, eps=0.1) finite-difference recipe when no
/// override is pinned. lambda_lower defaults to the Dh estimate and the
/// planner gamma0 to 1/lambda_lower.
PlannerConstants planner_constants(const ExperimentConfig& cfg);

/// Resolves (n, M) (through the planner when epsilon is given), then runs
/// `repetitions` independent repetitions on streams base_seed + i, possibly
/// across a worker pool, and aggregates the L1 error report in seed order.
/// The aggregation is a pure function of the configuration: thread count and
/// scheduling cannot change any reported value. Writes the per-run CSV to
/// cfg.out when set.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Deterministic per-run CSV table (no wall-clock columns).
std::string experiment_csv(const ExperimentReport& report);

/// One row per (mode, epsilon) in the benchmark-table schema
/// "epsilon,l1_error,time_s,R,n,M". time_s is wall clock and informational.
std::string table_report(const ExperimentConfig& base, std::span<const double> epsilons,
                         std::span<const Mode> modes);

/// CSV "R,n,residual" of signed extrapolated residuals against the oracle
/// root, for every requested level count and n in [n_min, n_max].
std::string bias_curve_csv(const ExperimentConfig& cfg, std::span<const int> levels_list,
                           int n_min, int n_max, std::int64_t steps);

struct VarianceComparison {
  double var_shared = 0.0;
  double var_independent = 0.0;
  std::string csv;  // 2*seeds estimator rows plus the two variance rows
};

/// Runs the R-level estimator under both couplings over `seeds` repetitions
/// and reports the sample variances of the final estimator.
VarianceComparison variance_compare(const ExperimentConfig& cfg, int levels, int n,
                                    std::int64_t steps, int seeds);

/// Thread-count resolution order: cfg.threads, RRSA_THREADS, hardware.
int resolve_threads(const ExperimentConfig& cfg);

/// Runs fn(0..count-1) on up to `threads` workers. Work items are claimed
/// atomically; callers must keep item outputs independent (slot per index).
void parallel_for_index(int count, int threads, const std::function<void(int)>& fn);

/// Shortest round-trip decimal text for a double (CSV/JSON payloads).
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace rrsa
