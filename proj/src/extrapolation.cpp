#include "rrsa/extrapolation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rrsa {

namespace {

// log(big^a - small^a) evaluated without forming big^a, stable for any a > 0.
double log_pow_diff(double big, double small, double a) {
  if (small == 0.0) return a * std::log(big);
  return a * std::log(big) + std::log1p(-std::exp(a * (std::log(small) - std::log(big))));
}

void check_args(int levels, double weak_order) {
  if (levels < 1)
    throw std::invalid_argument("extrapolation: levels must be >= 1");
  if (levels > kMaxLevels)
    throw std::invalid_argument("extrapolation: levels must be <= " +
                                std::to_string(kMaxLevels));
  if (!std::isfinite(weak_order) || weak_order <= 0.0)
    throw std::invalid_argument("extrapolation: weak_order must be finite and > 0");
}

}  // namespace

ExtrapolationWeights compute_weights(int levels, double weak_order) {
  check_args(levels, weak_order);
  const int R = levels;
  const double a = weak_order;

  ExtrapolationWeights out;
  out.levels = R;
  out.weak_order = a;
  out.w.resize(R);

  for (int r = 1; r <= R; ++r) {
    const double log_num = a * R * std::log(static_cast<double>(r));
    double log_den = 0.0;
    for (int j = 0; j < r; ++j) log_den += log_pow_diff(r, j, a);
    for (int j = r + 1; j <= R; ++j) log_den += log_pow_diff(j, r, a);

    const double sign = ((R - r) % 2 == 0) ? 1.0 : -1.0;
    double magnitude;
    if (log_num < 690.0 && std::fabs(log_den) < 690.0) {
      const double num = std::pow(static_cast<double>(r), a * R);
      double den = 1.0;
      for (int j = 0; j < r; ++j)
        den *= std::pow(static_cast<double>(r), a) - std::pow(static_cast<double>(j), a);
      for (int j = r + 1; j <= R; ++j)
        den *= std::pow(static_cast<double>(j), a) - std::pow(static_cast<double>(r), a);
      magnitude = num / den;  // single division
    } else {
      magnitude = std::exp(log_num - log_den);
    }
    out.w[r - 1] = sign * magnitude;
  }

  double factorial = 1.0;
  for (int j = 2; j <= R; ++j) factorial *= j;
  const double damped_sign = ((R - 1) % 2 == 0) ? 1.0 : -1.0;
  const double log_fact_a = a * std::log(factorial);
  out.damped = (log_fact_a < 690.0) ? damped_sign / std::pow(factorial, a)
                                    : damped_sign * std::exp(-log_fact_a);
  return out;
}

double vandermonde_residual(const ExtrapolationWeights& weights) {
  const int R = weights.levels;
  const double a = weights.weak_order;
  if (weights.w.size() != R)
    throw std::invalid_argument("vandermonde_residual: malformed weights");

  Eigen::MatrixXd vandermonde(R, R);
  for (int p = 1; p <= R; ++p)
    for (int r = 1; r <= R; ++r)
      vandermonde(p - 1, r - 1) = std::pow(static_cast<double>(r), -(p - 1) * a);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(R);
  rhs[0] = 1.0;
  return (vandermonde * weights.w - rhs).cwiseAbs().maxCoeff();
}

double independent_variance_multiplier(int levels, double weak_order) {
  return compute_weights(levels, weak_order).w.squaredNorm();
}

}  // namespace rrsa
