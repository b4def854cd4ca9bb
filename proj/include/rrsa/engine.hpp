#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrsa/errors.hpp"
#include "rrsa/extrapolation.hpp"
#include "rrsa/innovation.hpp"
#include "rrsa/schedule.hpp"
#include "rrsa/sde.hpp"

namespace rrsa {

/// Mean-field evaluation H(theta, x); the engine only needs the call.
template <class F>
concept SaField = requires(const F& f, double theta, double x) {
  { f(theta, x) } -> std::convertible_to<double>;
};

/// Orthogonal projection interval for the projected variant of the
/// recursion. Either bound may be infinite.
struct ProjectionBox {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  double clamp(double theta) const { return std::min(std::max(theta, lower), upper); }
};

struct EngineOptions {
  double weak_order = 1.0;
  /// Abort bound on |theta|; <= 0 selects the default
  /// 1e6 * max(1, |initial state|).
  double divergence_bound = 0.0;
};

/// Outcome of one stochastic approximation run (crude or extrapolated).
struct RunRecord {
  double estimator = 0.0;              // sum_r w_r * theta_r after M steps
  std::vector<double> per_level_final; // theta_r, r = 1..R
  std::int64_t steps_used = 0;         // M
  int base_steps = 0;                  // n
  int levels = 0;                      // R
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t fine_increments = 0;   // machine-independent cost counter
  std::uint64_t coupled_samples = 0;   // exactly M: one coupled draw per step
  double elapsed_seconds = 0.0;
};

namespace detail {

inline double divergence_bound(const EngineOptions& opt, double x0) {
  if (opt.divergence_bound > 0.0) return opt.divergence_bound;
  return 1e6 * std::max(1.0, std::abs(x0));
}

}  // namespace detail

/// R-level Richardson-Romberg stochastic approximation run.
///
/// At every step p one coupled sample is drawn (all levels at once; in
/// shared mode they consume the same Brownian path) and every chain is
/// updated with the same gain gamma(p):
///   theta_r <- Proj[ theta_r - gamma(p) * H(theta_r, terminal_r) ].
/// The estimator is the weighted combination sum_r w_r theta_r with the
/// Vandermonde weights for (levels, weak_order).
template <SaField F, ScalarSde M>
RunRecord run_rr(const F& field, const M& model, int base_steps, int levels,
                 std::int64_t steps, const StepSchedule& schedule,
                 std::span<const double> theta0, Coupling coupling, RngStream rng,
                 const std::optional<ProjectionBox>& box = std::nullopt,
                 const EngineOptions& opt = {}) {
  if (steps < 1) throw std::invalid_argument("run_rr: steps must be >= 1");
  if (static_cast<int>(theta0.size()) != levels)
    throw std::invalid_argument("run_rr: theta0 must provide one start per level");
  if (box && !(box->lower < box->upper))
    throw std::invalid_argument("run_rr: projection box requires lower < upper");
  const ExtrapolationWeights weights = compute_weights(levels, opt.weak_order);
  validate(schedule);  // throws on hard errors only

  const auto t0 = std::chrono::steady_clock::now();
  const double bound = detail::divergence_bound(opt, model.initial_state());

  std::vector<double> theta(theta0.begin(), theta0.end());
  CoupledSample sample;
  SampleStats stats;
  for (std::int64_t p = 1; p <= steps; ++p) {
    sample_coupled_into(model, base_steps, levels, rng, coupling, sample, &stats);
    const double g = gamma(schedule, p);
    for (int r = 0; r < levels; ++r) {
      double next = theta[r] - g * field(theta[r], sample.terminal[r]);
      if (box) next = box->clamp(next);
      if (!(std::abs(next) <= bound))
        throw DivergenceError("run diverged: |theta| = " + std::to_string(next) +
                              " exceeds bound " + std::to_string(bound) +
                              " at step " + std::to_string(p) + ", level " +
                              std::to_string(r + 1));
      theta[r] = next;
    }
  }

  RunRecord rec;
  rec.per_level_final = std::move(theta);
  rec.estimator = 0.0;
  for (int r = 0; r < levels; ++r)  // fixed order; kept exactly recomputable
    rec.estimator += weights.w[r] * rec.per_level_final[r];
  rec.steps_used = steps;
  rec.base_steps = base_steps;
  rec.levels = levels;
  rec.seed = rng.seed();
  rec.stream_id = rng.stream_id();
  rec.fine_increments = stats.fine_increments_drawn;
  rec.coupled_samples = stats.coupled_samples;
  rec.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

/// Single-level (crude) run: the R = 1 special case of run_rr, with the
/// identical innovation consumption order, so the two agree bit-for-bit.
template <SaField F, ScalarSde M>
RunRecord run_crude(const F& field, const M& model, int base_steps, std::int64_t steps,
                    const StepSchedule& schedule, double theta0, RngStream rng,
                    const std::optional<ProjectionBox>& box = std::nullopt,
                    const EngineOptions& opt = {}) {
  const double start[1] = {theta0};
  return run_rr(field, model, base_steps, 1, steps, schedule,
                std::span<const double>(start, 1), Coupling::shared, rng, box, opt);
}

struct BiasPoint {
  int levels = 0;
  int base_steps = 0;
  double residual = 0.0;  // estimator - theta_star
};

/// Signed residual of the extrapolated estimator against a reference root,
/// one run per (R, n) pair; rows in (levels, base_steps) loop order, each on
/// its own stream (first_stream, first_stream + 1, ...).
template <SaField F, ScalarSde M>
std::vector<BiasPoint> bias_curve(const F& field, const M& model,
                                  std::span<const int> levels_list,
                                  std::span<const int> steps_list, std::int64_t steps,
                                  const StepSchedule& schedule, double theta_star,
                                  std::uint64_t seed, std::uint64_t first_stream,
                                  Coupling coupling = Coupling::shared,
                                  const EngineOptions& opt = {}) {
  std::vector<BiasPoint> out;
  out.reserve(levels_list.size() * steps_list.size());
  std::uint64_t stream = first_stream;
  for (int levels : levels_list) {
    for (int n : steps_list) {
      std::vector<double> theta0(static_cast<std::size_t>(levels), model.initial_state());
      RunRecord rec = run_rr(field, model, n, levels, steps, schedule, theta0, coupling,
                             RngStream(seed, stream++), std::nullopt, opt);
      out.push_back({levels, n, rec.estimator - theta_star});
    }
  }
  return out;
}

}  // namespace rrsa
