#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rrsa {

/// Structural constants feeding the asymptotically optimal budget formulas.
///
/// The bias coefficient of the extrapolated target enters through
/// c_tilde = |C~_R| (unknown in practice; the blind convention sets it to 1)
/// divided by dh = Dh(theta*), the derivative of the mean field at the root.
/// gamma0 here is the step constant assumed by the closed-form statistical
/// error constant C = gamma0 / sqrt(2*lambda_lower*gamma0 - 1), which is
/// only available for beta = 1.
struct PlannerConstants {
  double weak_order = 1.0;   // bias expansion exponent (1 for Euler/Brownian)
  double beta = 1.0;         // step exponent; closed form requires beta = 1
  double gamma0 = 1.0;
  double lambda_lower = 1.0; // attractivity lower bound estimate
  double c_tilde = 1.0;      // |C~_R|, blind default 1
  double dh = 1.0;           // Dh(theta*) estimate
  double level = 0.5;        // quantile level, gives E|H|^2 = level/(1-level)
  double cost_unit = 1.0;    // K, cost of one unit-step simulation
};

struct DerivedConstants {
  double mu = 0.0;  // bias constant mu_R = (c_tilde/dh) / (R!)^a
  double nu = 0.0;  // statistical constant nu_R = C * sqrt(level/(1-level))
};

/// Budget (n, M) for one estimator together with its predicted cost
/// K * M * n * R(R+1)/2 and the accuracy it was planned for.
struct BudgetPlan {
  int base_steps = 0;        // n
  std::int64_t steps = 0;    // M
  int levels = 1;            // R
  double predicted_cost = 0.0;
  double epsilon = 0.0;
};

/// mu_R and nu_R for an R-level estimator under shared innovations (where
/// E|sum_r w_r H|^2 collapses to E|H|^2). Requires beta = 1 and
/// 2*lambda_lower*gamma0 > 1, the only regime with an explicit C.
DerivedConstants derive_constants(const PlannerConstants& pc, int levels);

/// Pre-ceiling real-valued budget; exposed for scaling-law checks.
///   n(eps) = (2aR/beta + 1)^{1/(aR)} mu_R^{1/(aR)} eps^{-1/(aR)}
///   M(eps) = gamma0^{1/beta} nu_R^{2/beta} (1 + beta/(2aR))^{2/beta} eps^{-2/beta}
struct RawBudget {
  double base_steps = 0.0;
  double steps = 0.0;
};
RawBudget plan_rr_raw(const PlannerConstants& pc, int levels, double epsilon);

/// Asymptotically optimal R-level budget, ceilings applied to n and M.
BudgetPlan plan_rr(const PlannerConstants& pc, int levels, double epsilon);

/// Single-level budget; identical formulas with R = 1.
BudgetPlan plan_crude(const PlannerConstants& pc, double epsilon);

/// K * M * n * R(R+1)/2; R = 1 gives the crude cost K * M * n.
double cost(const BudgetPlan& plan, double cost_unit = 1.0);

/// Plans for every requested level count plus the crude baseline (the R = 1
/// row), deduplicated and sorted by predicted cost. Advisory: the asymptotic
/// cost model ignores the o(1) terms, so the cheapest row is a suggestion,
/// not a guarantee.
std::vector<BudgetPlan> compare_costs(const PlannerConstants& pc, double epsilon,
                                      std::span<const int> levels_list);

}  // namespace rrsa
