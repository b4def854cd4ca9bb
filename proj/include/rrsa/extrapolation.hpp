#pragma once

#include <Eigen/Dense>

namespace rrsa {

/// Largest supported number of extrapolation levels. Keeps the lcm fine
/// grid and the weight products comfortably inside 64-bit / double range.
inline constexpr int kMaxLevels = 8;

/// Level weights of the multi-step Richardson-Romberg combination.
///
/// The R weights solve the Vandermonde system { sum_r w_r = 1,
/// sum_r w_r / r^{a p} = 0 for p = 1..R-1 }, where a is the weak-order
/// exponent of the discretization bias. `damped` is the scalar factor
/// (-1)^{R-1} / (R!)^a multiplying the surviving n^{-aR} bias term.
struct ExtrapolationWeights {
  int levels = 1;          // R
  double weak_order = 1.0; // a
  Eigen::VectorXd w;       // size R
  double damped = 1.0;
};

/// Closed-form solution of the Vandermonde weight system:
///   w_r = (-1)^{R-r} r^{aR} / ( prod_{j=0}^{r-1}(r^a - j^a)
///                             * prod_{j=r+1}^{R}(j^a - r^a) ),
/// with the empty product for r = R equal to 1. For a = 1 this reduces to
/// w_r = (-1)^{R-r} r^R / (r! (R-r)!).
///
/// Products are evaluated directly when their log magnitude is safely
/// inside double range (this keeps the a = 1 values bit-exact against the
/// factorial form) and in log-magnitude + sign form otherwise.
ExtrapolationWeights compute_weights(int levels, double weak_order);

/// Max-norm of V~ w - e1, where V~ is the scalar Vandermonde matrix with
/// entries 1 / r^{(p-1) a}. Independent consistency check of the closed
/// form; exact weights give a residual at roundoff level.
double vandermonde_residual(const ExtrapolationWeights& weights);

/// sum_r w_r^2: the factor multiplying E|H(theta*,U)|^2 in the statistical
/// error when the level innovations are mutually independent. Equals 1 for
/// R = 1 and grows like (R^R/R!)^{2a}; shared innovations keep the factor
/// at 1, which is why the coupled scheme is the default.
double independent_variance_multiplier(int levels, double weak_order);

}  // namespace rrsa
