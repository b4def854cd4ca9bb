#include <doctest.h>

#include <stdexcept>
#include <string>

#include "rrsa/schedule.hpp"

using rrsa::gamma;
using rrsa::StepSchedule;
using rrsa::validate;

namespace {

bool mentions(const std::vector<std::string>& warnings, const char* needle) {
  for (const std::string& w : warnings)
    if (w.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("gain sequence values") {
  CHECK(gamma({60.0, 1.0, {}}, 1) == 60.0);
  CHECK(gamma({60.0, 1.0, {}}, 60) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma({2.0, 0.75, {}}, 16) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(gamma({1.0, 1.0, {}}, 0), std::invalid_argument);
}

TEST_CASE("gain sequence decreases strictly") {
  for (const StepSchedule s : {StepSchedule{60.0, 1.0, {}}, StepSchedule{0.5, 0.6, {}},
                               StepSchedule{3.0, 0.8, {}}}) {
    for (int p = 1; p < 2000; ++p) CHECK(gamma(s, p + 1) < gamma(s, p));
  }
}

TEST_CASE("partial sums: sum gamma diverges, sum gamma^2 converges") {
  for (double beta : {0.6, 0.75, 1.0}) {
    const StepSchedule s{1.0, beta, {}};
    double sum1 = 0.0, sum1_prev = 0.0;
    double sum2_inc_a = 0.0, sum2_inc_b = 0.0;
    for (int p = 1; p <= 100000; ++p) {
      const double g = gamma(s, p);
      sum1 += g;
      if (p == 1000) sum1_prev = sum1;
      if (p > 1000 && p <= 10000) sum2_inc_a += g * g;
      if (p > 10000) sum2_inc_b += g * g;
    }
    // growth between P = 1e3 and P = 1e5 stays substantial
    CHECK(sum1 > sum1_prev * 1.5);
    // Cauchy increments of the squared series shrink
    CHECK(sum2_inc_b < sum2_inc_a);
  }
}

TEST_CASE("validation warnings and errors") {
  CHECK(validate({39.06, 1.0, 0.0256}).empty());
  CHECK(mentions(validate({1.0, 1.0, 0.0256}), "2*lambda_lower*gamma0"));
  CHECK(mentions(validate({60.0, 1.0, {}}), "blind"));
  CHECK(mentions(validate({60.0, 0.75, {}}), "suboptimal"));
  CHECK_THROWS_AS(validate({60.0, 0.4, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate({60.0, 1.5, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate({0.0, 1.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate({-3.0, 1.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate({1.0, 1.0, -0.1}), std::invalid_argument);
}
