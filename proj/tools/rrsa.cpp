// rrsa: multi-step Richardson-Romberg extrapolation for stochastic
// approximation. Subcommands: weights, plan, run, table, bias-curve,
// variance-compare. Exit codes: 0 ok, 2 configuration error, 3 divergence.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrsa/errors.hpp"
#include "rrsa/extrapolation.hpp"
#include "rrsa/harness.hpp"
#include "rrsa/model.hpp"
#include "rrsa/planner.hpp"

namespace {

using rrsa::ExperimentConfig;
using rrsa::Mode;

struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> repetitions;

  void apply(ExperimentConfig& cfg) const {
    if (seed) cfg.base_seed = *seed;
    if (threads) cfg.threads = *threads;
    if (repetitions) cfg.repetitions = *repetitions;
  }
};

void add_overrides(CLI::App* cmd, CommonOverrides& ov) {
  cmd->add_option("--seed", ov.seed, "Override base_seed");
  cmd->add_option("--threads", ov.threads, "Worker threads (also RRSA_THREADS)");
  cmd->add_option("--repetitions", ov.repetitions, "Override repetitions");
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    rrsa::write_text_file(out_path, text);
}

int cmd_weights(int levels, double weak_order, bool as_json) {
  const rrsa::ExtrapolationWeights w = rrsa::compute_weights(levels, weak_order);
  const double residual = rrsa::vandermonde_residual(w);
  const double multiplier = w.w.squaredNorm();
  if (as_json) {
    nlohmann::json doc;
    doc["levels"] = w.levels;
    doc["weak_order"] = w.weak_order;
    doc["w"] = std::vector<double>(w.w.data(), w.w.data() + w.w.size());
    doc["damped"] = w.damped;
    doc["vandermonde_residual"] = residual;
    doc["independent_variance_multiplier"] = multiplier;
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << "levels R = " << w.levels << ", weak order = " << w.weak_order << '\n';
    for (int r = 1; r <= w.levels; ++r)
      std::cout << "  w_" << r << " = " << rrsa::format_double(w.w[r - 1]) << '\n';
    std::cout << "damped weight   = " << rrsa::format_double(w.damped) << '\n'
              << "residual        = " << rrsa::format_double(residual) << '\n'
              << "indep. variance multiplier = " << rrsa::format_double(multiplier)
              << '\n';
  }
  return 0;
}

nlohmann::json plan_json(const rrsa::BudgetPlan& plan) {
  nlohmann::json doc;
  doc["epsilon"] = plan.epsilon;
  doc["R"] = plan.levels;
  doc["n"] = plan.base_steps;
  doc["M"] = plan.steps;
  doc["predicted_cost"] = plan.predicted_cost;
  return doc;
}

int cmd_plan(const std::string& config_path, std::optional<double> epsilon,
             std::optional<int> levels, bool crude, bool as_json,
             const std::vector<double>& sweep, const std::string& out_path,
             const CommonOverrides& ov) {
  ExperimentConfig cfg = rrsa::load_config(config_path);
  ov.apply(cfg);
  if (crude) cfg.mode = Mode::crude;
  if (levels) cfg.levels = *levels;
  const rrsa::PlannerConstants pc = rrsa::planner_constants(cfg);
  const int plan_levels = cfg.mode == Mode::crude ? 1 : cfg.levels;

  if (!sweep.empty()) {
    std::string csv = "epsilon,R,n,M,predicted_cost\n";
    for (double eps : sweep) {
      const rrsa::BudgetPlan plan = rrsa::plan_rr(pc, plan_levels, eps);
      csv += rrsa::format_double(eps) + ',' + std::to_string(plan.levels) + ',' +
             std::to_string(plan.base_steps) + ',' + std::to_string(plan.steps) + ',' +
             rrsa::format_double(plan.predicted_cost) + '\n';
    }
    emit(csv, out_path);
    return 0;
  }

  const double eps = epsilon ? *epsilon
                             : cfg.epsilon ? *cfg.epsilon
                                           : throw rrsa::ConfigError(
                                                 "plan: --epsilon required (none in config)");
  const rrsa::BudgetPlan plan = rrsa::plan_rr(pc, plan_levels, eps);
  if (as_json) {
    emit(plan_json(plan).dump(2) + "\n", out_path);
  } else {
    std::string text;
    text += "epsilon         = " + rrsa::format_double(plan.epsilon) + '\n';
    text += "R               = " + std::to_string(plan.levels) + '\n';
    text += "n               = " + std::to_string(plan.base_steps) + '\n';
    text += "M               = " + std::to_string(plan.steps) + '\n';
    text += "predicted cost  = " + rrsa::format_double(plan.predicted_cost) + '\n';
    text += "mu_R            = " + rrsa::format_double(rrsa::derive_constants(pc, plan_levels).mu) + '\n';
    text += "nu_R            = " + rrsa::format_double(rrsa::derive_constants(pc, plan_levels).nu) + '\n';
    emit(text, out_path);
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            const CommonOverrides& ov) {
  ExperimentConfig cfg = rrsa::load_config(config_path);
  ov.apply(cfg);
  if (!out_path.empty()) cfg.out = out_path;
  const rrsa::ExperimentReport report = rrsa::run_experiment(cfg);

  std::cout << "mode=" << (cfg.mode == Mode::crude ? "crude" : "rr")
            << " R=" << report.plan.levels << " n=" << report.plan.base_steps
            << " M=" << report.plan.steps << " repetitions=" << report.repetitions
            << '\n'
            << "theta* (oracle)      = " << rrsa::format_double(report.theta_star) << '\n'
            << "L1 error             = " << rrsa::format_double(report.l1_error)
            << " (std err " << rrsa::format_double(report.l1_std_error) << ")\n"
            << "total fine increments = " << report.total_fine_increments << '\n'
            << "mean elapsed per run = " << rrsa::format_double(report.mean_elapsed)
            << " s\n";
  if (report.partial) {
    std::cerr << "warning: " << (report.repetitions - report.completed)
              << " run(s) diverged\n";
    return 3;
  }
  return 0;
}

int cmd_table(const std::string& config_path, const std::vector<double>& epsilons,
              const std::vector<std::string>& mode_names, const std::string& out_path,
              const CommonOverrides& ov) {
  ExperimentConfig cfg = rrsa::load_config(config_path);
  ov.apply(cfg);
  std::vector<Mode> modes;
  for (const std::string& name : mode_names) {
    if (name == "rr")
      modes.push_back(Mode::rr);
    else if (name == "crude")
      modes.push_back(Mode::crude);
    else
      throw rrsa::ConfigError("table: unknown mode \"" + name + "\"");
  }
  emit(rrsa::table_report(cfg, epsilons, modes), out_path);
  return 0;
}

int cmd_bias_curve(const std::string& config_path, const std::vector<int>& levels,
                   int n_min, int n_max, std::int64_t steps, const std::string& out_path,
                   const CommonOverrides& ov) {
  ExperimentConfig cfg = rrsa::load_config(config_path);
  ov.apply(cfg);
  emit(rrsa::bias_curve_csv(cfg, levels, n_min, n_max, steps), out_path);
  return 0;
}

int cmd_variance_compare(const std::string& config_path, int levels, int n,
                         std::int64_t steps, int seeds, const std::string& out_path,
                         const CommonOverrides& ov) {
  ExperimentConfig cfg = rrsa::load_config(config_path);
  ov.apply(cfg);
  const rrsa::VarianceComparison cmp = rrsa::variance_compare(cfg, levels, n, steps, seeds);
  emit(cmp.csv, out_path);
  std::cerr << "var(shared) = " << rrsa::format_double(cmp.var_shared)
            << ", var(independent) = " << rrsa::format_double(cmp.var_independent) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-step Richardson-Romberg extrapolation for stochastic approximation"};
  app.require_subcommand(1);

  // weights
  int w_levels = 2;
  double w_order = 1.0;
  bool w_json = false;
  CLI::App* weights = app.add_subcommand("weights", "Print the extrapolation weight vector");
  weights->add_option("--levels", w_levels, "Number of levels R")->required();
  weights->add_option("--weak-order", w_order, "Weak-order exponent")->capture_default_str();
  weights->add_flag("--json", w_json, "JSON output");

  // plan
  std::string p_config, p_out;
  std::optional<double> p_eps;
  std::optional<int> p_levels;
  bool p_crude = false, p_json = false;
  std::vector<double> p_sweep;
  CommonOverrides p_ov;
  CLI::App* plan = app.add_subcommand("plan", "Asymptotically optimal budget (n, M)");
  plan->add_option("--config", p_config, "JSON config file")->required();
  plan->add_option("--epsilon", p_eps, "Target accuracy");
  plan->add_option("--levels", p_levels, "Number of levels R");
  plan->add_flag("--crude", p_crude, "Plan the single-level estimator");
  plan->add_flag("--json", p_json, "JSON output");
  plan->add_option("--sweep", p_sweep, "Comma-separated epsilon grid (emits CSV)")
      ->delimiter(',');
  plan->add_option("--out", p_out, "Write to file instead of stdout");
  add_overrides(plan, p_ov);

  // run
  std::string r_config, r_out;
  CommonOverrides r_ov;
  CLI::App* run = app.add_subcommand("run", "Run one experiment and report the L1 error");
  run->add_option("--config", r_config, "JSON config file")->required();
  run->add_option("--out", r_out, "Per-run CSV path (overrides config)");
  add_overrides(run, r_ov);

  // table
  std::string t_config, t_out;
  std::vector<double> t_eps;
  std::vector<std::string> t_modes{"rr", "crude"};
  CommonOverrides t_ov;
  CLI::App* table = app.add_subcommand("table", "Accuracy/cost table over an epsilon grid");
  table->add_option("--config", t_config, "JSON config file")->required();
  table->add_option("--epsilons", t_eps, "Comma-separated accuracies")
      ->required()
      ->delimiter(',');
  table->add_option("--modes", t_modes, "Estimator modes (rr, crude)")->delimiter(',');
  table->add_option("--out", t_out, "Write CSV to file instead of stdout");
  add_overrides(table, t_ov);

  // bias-curve
  std::string b_config, b_out;
  std::vector<int> b_levels{2, 3, 4};
  int b_nmin = 2, b_nmax = 15;
  std::int64_t b_steps = 1000000;
  CommonOverrides b_ov;
  CLI::App* bias = app.add_subcommand("bias-curve", "Signed residual per (R, n) as CSV");
  bias->add_option("--config", b_config, "JSON config file")->required();
  bias->add_option("--levels", b_levels, "Level counts R")->delimiter(',');
  bias->add_option("--n-min", b_nmin, "Smallest n")->capture_default_str();
  bias->add_option("--n-max", b_nmax, "Largest n")->capture_default_str();
  bias->add_option("--steps", b_steps, "SA steps M per run")->capture_default_str();
  bias->add_option("--out", b_out, "Write CSV to file instead of stdout");
  add_overrides(bias, b_ov);

  // variance-compare
  std::string v_config, v_out;
  int v_levels = 3, v_n = 4, v_seeds = 20;
  std::int64_t v_steps = 100000;
  CommonOverrides v_ov;
  CLI::App* var = app.add_subcommand("variance-compare",
                                     "Estimator variance under shared vs independent coupling");
  var->add_option("--config", v_config, "JSON config file")->required();
  var->add_option("--levels", v_levels, "Number of levels R")->capture_default_str();
  var->add_option("--n", v_n, "Base discretization steps")->capture_default_str();
  var->add_option("--steps", v_steps, "SA steps M per run")->capture_default_str();
  var->add_option("--seeds", v_seeds, "Repetitions per coupling")->capture_default_str();
  var->add_option("--out", v_out, "Write CSV to file instead of stdout");
  add_overrides(var, v_ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (weights->parsed()) return cmd_weights(w_levels, w_order, w_json);
    if (plan->parsed())
      return cmd_plan(p_config, p_eps, p_levels, p_crude, p_json, p_sweep, p_out, p_ov);
    if (run->parsed()) return cmd_run(r_config, r_out, r_ov);
    if (table->parsed()) return cmd_table(t_config, t_eps, t_modes, t_out, t_ov);
    if (bias->parsed())
      return cmd_bias_curve(b_config, b_levels, b_nmin, b_nmax, b_steps, b_out, b_ov);
    if (var->parsed())
      return cmd_variance_compare(v_config, v_levels, v_n, v_steps, v_seeds, v_out, v_ov);
  } catch (const rrsa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const rrsa::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
