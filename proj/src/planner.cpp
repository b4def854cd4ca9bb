#include "rrsa/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rrsa/extrapolation.hpp"

namespace rrsa {

namespace {

void check_constants(const PlannerConstants& pc) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(pc.weak_order) || !positive(pc.gamma0) || !positive(pc.lambda_lower) ||
      !positive(pc.c_tilde) || !positive(pc.dh) || !positive(pc.cost_unit))
    throw std::invalid_argument("planner: constants must be finite and > 0");
  if (!(pc.beta > 0.5 && pc.beta <= 1.0))
    throw std::invalid_argument("planner: beta must lie in (1/2, 1]");
  if (!(pc.level > 0.0 && pc.level < 1.0))
    throw std::invalid_argument("planner: level must lie in (0,1)");
}

}  // namespace

DerivedConstants derive_constants(const PlannerConstants& pc, int levels) {
  check_constants(pc);
  if (levels < 1 || levels > kMaxLevels)
    throw std::invalid_argument("planner: levels out of range");
  if (pc.beta != 1.0)
    throw std::invalid_argument(
        "planner: the closed-form statistical constant requires beta = 1");
  const double stability = 2.0 * pc.lambda_lower * pc.gamma0 - 1.0;
  if (stability <= 0.0)
    throw std::invalid_argument(
        "planner: 2*lambda_lower*gamma0 must exceed 1 (C undefined otherwise)");

  double factorial = 1.0;
  for (int j = 2; j <= levels; ++j) factorial *= j;

  DerivedConstants out;
  out.mu = (pc.c_tilde / pc.dh) / std::pow(factorial, pc.weak_order);
  const double c = pc.gamma0 / std::sqrt(stability);
  out.nu = c * std::sqrt(pc.level / (1.0 - pc.level));
  return out;
}

RawBudget plan_rr_raw(const PlannerConstants& pc, int levels, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("planner: epsilon must be finite and > 0");
  const DerivedConstants dc = derive_constants(pc, levels);
  const double ar = pc.weak_order * levels;

  RawBudget raw;
  raw.base_steps = std::pow((2.0 * ar / pc.beta + 1.0) * dc.mu / epsilon, 1.0 / ar);
  raw.steps = std::pow(pc.gamma0, 1.0 / pc.beta) *
              std::pow(dc.nu * dc.nu * (1.0 + pc.beta / (2.0 * ar)) *
                           (1.0 + pc.beta / (2.0 * ar)) / (epsilon * epsilon),
                       1.0 / pc.beta);
  return raw;
}

BudgetPlan plan_rr(const PlannerConstants& pc, int levels, double epsilon) {
  const RawBudget raw = plan_rr_raw(pc, levels, epsilon);
  BudgetPlan plan;
  plan.base_steps = static_cast<int>(std::ceil(raw.base_steps));
  plan.steps = static_cast<std::int64_t>(std::ceil(raw.steps));
  plan.levels = levels;
  plan.epsilon = epsilon;
  plan.predicted_cost = cost(plan, pc.cost_unit);
  return plan;
}

BudgetPlan plan_crude(const PlannerConstants& pc, double epsilon) {
  return plan_rr(pc, 1, epsilon);
}

double cost(const BudgetPlan& plan, double cost_unit) {
  return cost_unit * static_cast<double>(plan.steps) * plan.base_steps *
         (plan.levels * (plan.levels + 1)) / 2.0;
}

std::vector<BudgetPlan> compare_costs(const PlannerConstants& pc, double epsilon,
                                      std::span<const int> levels_list) {
  std::vector<int> levels(levels_list.begin(), levels_list.end());
  if (std::find(levels.begin(), levels.end(), 1) == levels.end())
    levels.push_back(1);  // crude baseline
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<BudgetPlan> plans;
  plans.reserve(levels.size());
  for (int r : levels) plans.push_back(plan_rr(pc, r, epsilon));
  std::stable_sort(plans.begin(), plans.end(), [](const auto& a, const auto& b) {
    return a.predicted_cost < b.predicted_cost;
  });
  return plans;
}

}  // namespace rrsa
