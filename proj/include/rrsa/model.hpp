#pragma once

#include <cmath>
#include <stdexcept>

#include "rrsa/innovation.hpp"
#include "rrsa/normal.hpp"
#include "rrsa/rng.hpp"
#include "rrsa/sde.hpp"

namespace rrsa {

/// Mean field of quantile estimation at level in (0,1):
///   H(theta, x) = 1                 if x <  theta,
///                 -level/(1-level)  if x >= theta,
/// so that E[H(theta*, X)] = 0 exactly when P(X <= theta*) = level.
struct QuantileField {
  double level = 0.5;

  QuantileField() = default;
  explicit QuantileField(double l) : level(l) {
    if (!(l > 0.0 && l < 1.0))
      throw std::invalid_argument("QuantileField: level must lie in (0,1)");
  }

  double operator()(double theta, double x) const {
    return (x >= theta) ? 1.0 - 1.0 / (1.0 - level) : 1.0;
  }

  /// E[H(theta*, X)^2] = level / (1 - level) at the root.
  double second_moment_at_root() const { return level / (1.0 - level); }
};

/// Exact quantile of the geometric Brownian motion terminal value:
///   x0 * exp((rate - sigma^2/2) T + sigma sqrt(T) * Phi^{-1}(level)).
double gbm_quantile(double x0, double rate, double sigma, double T, double level);

inline double gbm_quantile(const GbmModel& m, double level) {
  return gbm_quantile(m.x0, m.rate, m.sigma, m.T, level);
}

struct DensityEstimate {
  double value = 0.0;      // central finite-difference density estimate
  double std_error = 0.0;  // Monte Carlo standard error of `value`
  long long samples = 0;
};

/// Monte Carlo central finite-difference estimate of the terminal density of
/// the n-step Euler scheme at theta:
///   ( #{theta - eps < X <= theta + eps} ) / (2 eps M).
/// A zero estimate is returned as-is; callers guard the downstream division.
template <ScalarSde M>
DensityEstimate estimate_density(const M& model, double theta, int n,
                                 long long samples, double eps_fd, RngStream& rng) {
  if (samples < 1) throw std::invalid_argument("estimate_density: samples must be >= 1");
  if (!(eps_fd > 0.0)) throw std::invalid_argument("estimate_density: eps_fd must be > 0");

  long long in_window = 0;
  CoupledSample sample;
  for (long long k = 0; k < samples; ++k) {
    sample_coupled_into(model, n, 1, rng, Coupling::shared, sample);
    const double x = sample.terminal[0];
    if (x <= theta + eps_fd && x > theta - eps_fd) ++in_window;
  }
  const double p = static_cast<double>(in_window) / static_cast<double>(samples);
  DensityEstimate est;
  est.samples = samples;
  est.value = p / (2.0 * eps_fd);
  est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(samples)) / (2.0 * eps_fd);
  return est;
}

}  // namespace rrsa
