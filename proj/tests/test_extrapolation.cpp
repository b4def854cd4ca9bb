#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "rrsa/extrapolation.hpp"

using rrsa::compute_weights;
using rrsa::ExtrapolationWeights;
using rrsa::independent_variance_multiplier;
using rrsa::vandermonde_residual;

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

double int_pow(int base, int exp) {
  double p = 1.0;
  for (int j = 0; j < exp; ++j) p *= base;
  return p;
}

// Independent oracle: dense LU solve of the Vandermonde system V~ w = e1.
Eigen::VectorXd solve_weights(int levels, double weak_order) {
  Eigen::MatrixXd v(levels, levels);
  for (int p = 1; p <= levels; ++p)
    for (int r = 1; r <= levels; ++r)
      v(p - 1, r - 1) = 1.0 / std::pow(static_cast<double>(r), (p - 1) * weak_order);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(levels);
  e1[0] = 1.0;
  return v.fullPivLu().solve(e1);
}

}  // namespace

TEST_CASE("two-level weights at weak order 1") {
  const ExtrapolationWeights w = compute_weights(2, 1.0);
  CHECK(w.w.size() == 2);
  CHECK(w.w[0] == -1.0);
  CHECK(w.w[1] == 2.0);
  CHECK(w.damped == -0.5);
  CHECK(vandermonde_residual(w) < 1e-12);
}

TEST_CASE("single level degenerates to the identity combination") {
  const ExtrapolationWeights w = compute_weights(1, 1.0);
  CHECK(w.w.size() == 1);
  CHECK(w.w[0] == 1.0);
  CHECK(w.damped == 1.0);
}

TEST_CASE("three-level weights at weak order 1") {
  const ExtrapolationWeights w = compute_weights(3, 1.0);
  CHECK(w.w[0] == 0.5);
  CHECK(w.w[1] == -4.0);
  CHECK(w.w[2] == 4.5);
  // damped = (-1)^{R-1} / (R!)^a, positive for odd R
  CHECK(w.damped == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("weak order 1 weights are exactly r^R / (r! (R-r)!), alternating") {
  for (int levels = 1; levels <= 6; ++levels) {
    const ExtrapolationWeights w = compute_weights(levels, 1.0);
    for (int r = 1; r <= levels; ++r) {
      const double sign = ((levels - r) % 2 == 0) ? 1.0 : -1.0;
      const double ref = sign * int_pow(r, levels) / (factorial(r) * factorial(levels - r));
      CHECK(w.w[r - 1] == ref);  // bit-exact
      CHECK(std::signbit(w.w[r - 1]) == std::signbit(sign));
    }
  }
}

TEST_CASE("closed form matches a dense linear solve of the system") {
  for (int levels = 1; levels <= 6; ++levels) {
    for (double order : {0.5, 1.0, 2.0}) {
      CAPTURE(levels);
      CAPTURE(order);
      const ExtrapolationWeights w = compute_weights(levels, order);
      const Eigen::VectorXd ref = solve_weights(levels, order);
      for (int r = 0; r < levels; ++r)
        CHECK(w.w[r] == doctest::Approx(ref[r]).epsilon(1e-9));
      CHECK(vandermonde_residual(w) < 1e-9);
      CHECK(std::abs(w.w.sum() - 1.0) < 1e-12);

      const double damped_ref =
          (((levels - 1) % 2 == 0) ? 1.0 : -1.0) / std::pow(factorial(levels), order);
      CHECK(std::abs(w.damped - damped_ref) < 1e-12);
    }
  }
}

TEST_CASE("residual examples at mixed orders") {
  CHECK(vandermonde_residual(compute_weights(5, 1.0)) < 1e-10);
  CHECK(vandermonde_residual(compute_weights(3, 0.5)) < 1e-10);
}

TEST_CASE("independent-coupling variance multiplier") {
  CHECK(independent_variance_multiplier(1, 1.0) == 1.0);
  CHECK(independent_variance_multiplier(2, 1.0) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(independent_variance_multiplier(3, 1.0) == doctest::Approx(36.5).epsilon(1e-13));

  // lower bound (R^R / R!)^{2a}
  for (int levels = 1; levels <= 6; ++levels) {
    for (double order : {0.5, 1.0, 2.0}) {
      const double bound =
          std::pow(int_pow(levels, levels) / factorial(levels), 2.0 * order);
      CHECK(independent_variance_multiplier(levels, order) >= bound * (1.0 - 1e-12));
    }
  }
  CHECK(std::pow(int_pow(3, 3) / factorial(3), 2.0) == 20.25);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(compute_weights(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_weights(-2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_weights(9, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_weights(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_weights(2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_weights(2, std::nan("")), std::invalid_argument);
}

TEST_CASE("large weak order falls back to the log-magnitude path") {
  // 8^(50*8) overflows double; the ratio does not.
  const ExtrapolationWeights w = compute_weights(8, 50.0);
  for (int r = 1; r <= 8; ++r) {
    CHECK(std::isfinite(w.w[r - 1]));
    const bool negative = ((8 - r) % 2 != 0);
    CHECK(std::signbit(w.w[r - 1]) == negative);
  }
}
