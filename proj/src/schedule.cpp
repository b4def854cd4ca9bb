#include "rrsa/schedule.hpp"

namespace rrsa {

std::vector<std::string> validate(const StepSchedule& schedule) {
  if (!std::isfinite(schedule.gamma0) || schedule.gamma0 <= 0.0)
    throw std::invalid_argument("schedule: gamma0 must be finite and > 0");
  if (!(schedule.beta > 0.5 && schedule.beta <= 1.0))
    throw std::invalid_argument("schedule: beta must lie in (1/2, 1]");
  if (schedule.lambda_lower && *schedule.lambda_lower <= 0.0)
    throw std::invalid_argument("schedule: lambda_lower must be > 0 when given");

  std::vector<std::string> warnings;
  if (schedule.beta < 1.0)
    warnings.push_back("beta < 1: suboptimal asymptotic complexity (beta = 1 is optimal)");
  if (schedule.beta == 1.0) {
    if (schedule.lambda_lower) {
      if (2.0 * *schedule.lambda_lower * schedule.gamma0 <= 1.0)
        warnings.push_back(
            "2*lambda_lower*gamma0 <= 1: the gamma(M)^{1/2} statistical-error "
            "rate is not guaranteed for beta = 1");
    } else {
      warnings.push_back(
          "lambda_lower not provided: the beta = 1 condition "
          "2*lambda_lower*gamma0 > 1 cannot be checked (blind step choice)");
    }
  }
  return warnings;
}

}  // namespace rrsa
