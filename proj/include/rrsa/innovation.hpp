#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrsa/errors.hpp"
#include "rrsa/extrapolation.hpp"
#include "rrsa/rng.hpp"
#include "rrsa/sde.hpp"

namespace rrsa {

/// How the R Euler levels of one coupled draw share randomness.
/// `shared` drives every level with the same Brownian path (the
/// variance-controlled choice); `independent` gives each level its own path.
enum class Coupling { shared, independent };

/// lcm(1, ..., R): refinement of the common fine grid on which one Brownian
/// path serves every level step T/(rn) exactly.
inline int fine_grid_factor(int levels) {
  if (levels < 1 || levels > kMaxLevels)
    throw std::invalid_argument("fine_grid_factor: levels must lie in [1, " +
                                std::to_string(kMaxLevels) + "]");
  int l = 1;
  for (int r = 2; r <= levels; ++r) l = std::lcm(l, r);
  return l;
}

/// One draw of the R coupled Euler terminal values sharing a Brownian path.
///
/// `terminal[r-1]` is the monitored terminal value of the level with step
/// T/(rn). In shared mode `fine_increments` holds the n*L fine Brownian
/// increments the draw consumed; `coarse_increments` (diagnostic, opt-in)
/// holds each level's aggregated increments, each one computed as the
/// left-to-right sum of its fine sub-increments and therefore reproducible
/// bit-for-bit from `fine_increments`.
struct CoupledSample {
  int levels = 0;      // R
  int base_steps = 0;  // n
  std::vector<double> terminal;
  std::vector<double> fine_increments;
  std::vector<std::vector<double>> coarse_increments;
};

/// Running cost counters; fine_increments_drawn is the machine-independent
/// cost proxy used by reports (one unit per simulated Gaussian increment).
struct SampleStats {
  std::uint64_t fine_increments_drawn = 0;
  std::uint64_t coupled_samples = 0;
};

/// n_fine i.i.d. N(0, dt) increments, deterministic given the stream state.
inline std::vector<double> brownian_increments(int n_fine, double dt, RngStream& rng) {
  if (n_fine < 1) throw std::invalid_argument("brownian_increments: n_fine must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("brownian_increments: dt must be > 0");
  std::vector<double> out(static_cast<std::size_t>(n_fine));
  const double scale = std::sqrt(dt);
  for (double& v : out) v = scale * rng.next_gaussian();
  return out;
}

namespace detail {

[[noreturn]] inline void throw_blow_up(int level, int step, double state) {
  throw DivergenceError("euler scheme blow-up: non-finite state " +
                        std::to_string(state) + " at level " + std::to_string(level) +
                        ", step " + std::to_string(step));
}

}  // namespace detail

/// Allocation-free variant of sample_coupled: `out` is reused across calls.
///
/// Shared coupling draws the n*L fine increments once and aggregates
/// consecutive groups of L/r of them into the level-r increments, so the
/// levels see consistent Brownian increments exactly (aggregation is plain
/// left-to-right summation). Independent coupling draws each level's rn
/// increments directly at its own step variance.
template <ScalarSde M>
void sample_coupled_into(const M& model, int base_steps, int levels, RngStream& rng,
                         Coupling coupling, CoupledSample& out,
                         SampleStats* stats = nullptr, bool keep_increments = false) {
  if (base_steps < 1)
    throw std::invalid_argument("sample_coupled: base_steps must be >= 1");
  const int fine_factor = fine_grid_factor(levels);  // validates levels

  out.levels = levels;
  out.base_steps = base_steps;
  out.terminal.resize(static_cast<std::size_t>(levels));
  if (keep_increments)
    out.coarse_increments.assign(static_cast<std::size_t>(levels), {});
  else
    out.coarse_increments.clear();

  const double T = model.horizon();

  if (coupling == Coupling::shared) {
    const int n_fine = base_steps * fine_factor;
    const double fine_scale = std::sqrt(T / n_fine);
    out.fine_increments.resize(static_cast<std::size_t>(n_fine));
    for (double& v : out.fine_increments) v = fine_scale * rng.next_gaussian();

    for (int r = 1; r <= levels; ++r) {
      const int steps = r * base_steps;
      const int group = fine_factor / r;
      const double dt = T / steps;
      if (keep_increments)
        out.coarse_increments[r - 1].resize(static_cast<std::size_t>(steps));

      double x = model.initial_state();
      std::size_t idx = 0;
      for (int k = 0; k < steps; ++k) {
        double dw = 0.0;
        for (int j = 0; j < group; ++j) dw += out.fine_increments[idx++];
        if (keep_increments) out.coarse_increments[r - 1][k] = dw;
        x += model.drift(x) * dt + model.diffusion(x) * dw;
        if (!std::isfinite(x)) detail::throw_blow_up(r, k, x);
      }
      out.terminal[r - 1] = x;
    }
    if (stats) {
      stats->fine_increments_drawn += static_cast<std::uint64_t>(n_fine);
      ++stats->coupled_samples;
    }
  } else {
    out.fine_increments.clear();
    std::uint64_t drawn = 0;
    for (int r = 1; r <= levels; ++r) {
      const int steps = r * base_steps;
      const double dt = T / steps;
      const double scale = std::sqrt(dt);
      if (keep_increments)
        out.coarse_increments[r - 1].resize(static_cast<std::size_t>(steps));

      double x = model.initial_state();
      for (int k = 0; k < steps; ++k) {
        const double dw = scale * rng.next_gaussian();
        if (keep_increments) out.coarse_increments[r - 1][k] = dw;
        x += model.drift(x) * dt + model.diffusion(x) * dw;
        if (!std::isfinite(x)) detail::throw_blow_up(r, k, x);
      }
      out.terminal[r - 1] = x;
      drawn += static_cast<std::uint64_t>(steps);
    }
    if (stats) {
      stats->fine_increments_drawn += drawn;
      ++stats->coupled_samples;
    }
  }
}

template <ScalarSde M>
CoupledSample sample_coupled(const M& model, int base_steps, int levels, RngStream& rng,
                             Coupling coupling = Coupling::shared,
                             SampleStats* stats = nullptr, bool keep_increments = false) {
  CoupledSample out;
  sample_coupled_into(model, base_steps, levels, rng, coupling, out, stats, keep_increments);
  return out;
}

}  // namespace rrsa
