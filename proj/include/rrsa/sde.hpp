#pragma once

#include <cmath>
#include <concepts>
#include <functional>

#include "rrsa/normal.hpp"

namespace rrsa {

/// A scalar SDE dX = b(X) dt + s(X) dW on [0, horizon], monitored at the
/// terminal time. Models are immutable values; the Euler scheme and the
/// stochastic approximation engine are templated on this concept so that
/// drift/diffusion calls inline into the simulation loop.
template <class M>
concept ScalarSde = requires(const M& m, double x) {
  { m.drift(x) } -> std::convertible_to<double>;
  { m.diffusion(x) } -> std::convertible_to<double>;
  { m.initial_state() } -> std::convertible_to<double>;
  { m.horizon() } -> std::convertible_to<double>;
};

/// Geometric Brownian motion dX = rate*X dt + sigma*X dW. The benchmark
/// model: its terminal law and quantiles are known in closed form, which the
/// oracles use, while the simulation path always goes through the Euler
/// scheme whose bias is the quantity under study.
struct GbmModel {
  double x0 = 100.0;
  double rate = 0.05;
  double sigma = 0.4;
  double T = 1.0;

  double drift(double x) const { return rate * x; }
  double diffusion(double x) const { return sigma * x; }
  double initial_state() const { return x0; }
  double horizon() const { return T; }

  /// Exact terminal value for a standard normal draw z (oracle use only).
  double exact_terminal(double z) const {
    return x0 * std::exp((rate - 0.5 * sigma * sigma) * T + sigma * std::sqrt(T) * z);
  }

  /// Exact lognormal density of X_T at y > 0 (oracle use only).
  double exact_density(double y) const {
    const double s = sigma * std::sqrt(T);
    const double z = (std::log(y / x0) - (rate - 0.5 * sigma * sigma) * T) / s;
    return normal_pdf(z) / (y * s);
  }
};

/// Arbitrary scalar model from plain callables; used for custom models and
/// for degenerate test dynamics (zero drift/diffusion, pure ODE drift, ...).
struct CustomScalarModel {
  std::function<double(double)> b;
  std::function<double(double)> s;
  double x0 = 0.0;
  double T = 1.0;

  double drift(double x) const { return b ? b(x) : 0.0; }
  double diffusion(double x) const { return s ? s(x) : 0.0; }
  double initial_state() const { return x0; }
  double horizon() const { return T; }
};

static_assert(ScalarSde<GbmModel>);
static_assert(ScalarSde<CustomScalarModel>);

}  // namespace rrsa
