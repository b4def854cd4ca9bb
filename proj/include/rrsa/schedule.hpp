#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rrsa {

/// Gain sequence gamma(p) = gamma0 / p^beta of a stochastic approximation
/// run. beta in (1/2, 1] guarantees sum gamma = inf and sum gamma^2 < inf.
///
/// lambda_lower is the user's estimate of the uniform attractivity bound of
/// the mean field; it is optional because it is typically unknown, in which
/// case the beta = 1 stability condition 2 * lambda_lower * gamma0 > 1 can
/// only be flagged, not checked.
struct StepSchedule {
  double gamma0 = 1.0;
  double beta = 1.0;
  std::optional<double> lambda_lower;
};

inline double gamma(const StepSchedule& schedule, std::int64_t p) {
  if (p < 1) throw std::invalid_argument("schedule: step index must be >= 1");
  return schedule.gamma0 / std::pow(static_cast<double>(p), schedule.beta);
}

/// Hard-validates gamma0 and beta (throws) and returns soft warnings:
/// beta < 1 costs asymptotic complexity, and for beta = 1 the run is only
/// guaranteed stable when 2 * lambda_lower * gamma0 > 1.
std::vector<std::string> validate(const StepSchedule& schedule);

}  // namespace rrsa
