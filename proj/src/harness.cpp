#include "rrsa/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rrsa/errors.hpp"

namespace rrsa {

namespace {

using nlohmann::json;

// Auxiliary draws (the Dh recipe) live on a tagged stream id so they can
// never collide with the per-run streams base_seed + i.
constexpr std::uint64_t kDensityStream = (1ULL << 63) | 1ULL;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("config: unknown key \"" + item.key() + "\" in " + where);
  }
}

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ConfigError("config: " + where + " requires numeric \"" + key + "\"");
  return obj[key].get<double>();
}

}  // namespace

namespace {
ExperimentConfig parse_config_impl(const json& root);
}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    return parse_config_impl(root);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

namespace {

ExperimentConfig parse_config_impl(const json& root) {
  if (!root.is_object()) throw ConfigError("config: top level must be a JSON object");
  reject_unknown_keys(root,
                      {"model", "schedule", "mode", "R", "weak_order", "epsilon", "n", "M",
                       "repetitions", "base_seed", "coupling", "out", "K", "theta0",
                       "theta_ref", "threads", "planner"},
                      "top level");

  ExperimentConfig cfg;

  if (!root.contains("model") || !root["model"].is_object())
    throw ConfigError("config: missing \"model\" block");
  const json& model = root["model"];
  reject_unknown_keys(model, {"model", "x0", "rate", "sigma", "horizon", "level", "dh_override"},
                      "model block");
  const std::string kind = model.value("model", "gbm");
  if (kind != "gbm")
    throw ConfigError("config: unsupported model \"" + kind + "\" (only \"gbm\")");
  cfg.model.x0 = require_number(model, "x0", "model block");
  cfg.model.rate = require_number(model, "rate", "model block");
  cfg.model.sigma = require_number(model, "sigma", "model block");
  cfg.model.T = require_number(model, "horizon", "model block");
  cfg.level = require_number(model, "level", "model block");
  if (model.contains("dh_override")) cfg.dh_override = model["dh_override"].get<double>();
  if (!(cfg.model.x0 > 0.0) || !(cfg.model.sigma > 0.0) || !(cfg.model.T > 0.0))
    throw ConfigError("config: gbm requires x0 > 0, sigma > 0, horizon > 0");
  if (!(cfg.level > 0.0 && cfg.level < 1.0))
    throw ConfigError("config: level must lie in (0,1)");

  if (!root.contains("schedule") || !root["schedule"].is_object())
    throw ConfigError("config: missing \"schedule\" block");
  const json& sched = root["schedule"];
  reject_unknown_keys(sched, {"gamma0", "beta", "lambda_lower"}, "schedule block");
  cfg.schedule.gamma0 = require_number(sched, "gamma0", "schedule block");
  cfg.schedule.beta = sched.value("beta", 1.0);
  if (sched.contains("lambda_lower"))
    cfg.schedule.lambda_lower = sched["lambda_lower"].get<double>();
  try {
    validate(cfg.schedule);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  const std::string mode = root.value("mode", "rr");
  if (mode == "crude")
    cfg.mode = Mode::crude;
  else if (mode == "rr")
    cfg.mode = Mode::rr;
  else
    throw ConfigError("config: mode must be \"crude\" or \"rr\"");

  cfg.levels = root.value("R", 2);
  cfg.weak_order = root.value("weak_order", 1.0);
  if (root.contains("epsilon")) cfg.epsilon = root["epsilon"].get<double>();
  if (root.contains("n")) cfg.explicit_n = root["n"].get<int>();
  if (root.contains("M")) cfg.explicit_steps = root["M"].get<std::int64_t>();
  cfg.repetitions = root.value("repetitions", 50);
  cfg.base_seed = root.value("base_seed", std::uint64_t{0});
  const std::string coupling = root.value("coupling", "shared");
  if (coupling == "shared")
    cfg.coupling = Coupling::shared;
  else if (coupling == "independent")
    cfg.coupling = Coupling::independent;
  else
    throw ConfigError("config: coupling must be \"shared\" or \"independent\"");
  cfg.out = root.value("out", "");
  cfg.cost_unit = root.value("K", 1.0);
  if (root.contains("theta0")) cfg.theta0 = root["theta0"].get<double>();
  if (root.contains("theta_ref")) cfg.theta_ref = root["theta_ref"].get<double>();
  if (root.contains("threads")) cfg.threads = root["threads"].get<int>();

  if (root.contains("planner")) {
    const json& planner = root["planner"];
    reject_unknown_keys(planner, {"gamma0", "c_tilde"}, "planner block");
    if (planner.contains("gamma0")) cfg.planner_gamma0 = planner["gamma0"].get<double>();
    cfg.c_tilde = planner.value("c_tilde", 1.0);
  }

  const bool have_eps = cfg.epsilon.has_value();
  const bool have_explicit = cfg.explicit_n.has_value() || cfg.explicit_steps.has_value();
  if (have_explicit && (!cfg.explicit_n || !cfg.explicit_steps))
    throw ConfigError("config: explicit budget needs both \"n\" and \"M\"");
  if (have_eps == have_explicit)
    throw ConfigError("config: provide exactly one of \"epsilon\" or (\"n\", \"M\")");
  if (cfg.repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
  if (cfg.levels < 1 || cfg.levels > kMaxLevels)
    throw ConfigError("config: R must lie in [1, " + std::to_string(kMaxLevels) + "]");
  return cfg;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

PlannerConstants planner_constants(const ExperimentConfig& cfg) {
  PlannerConstants pc;
  pc.weak_order = cfg.weak_order;
  pc.beta = cfg.schedule.beta;
  pc.level = cfg.level;
  pc.c_tilde = cfg.c_tilde;
  pc.cost_unit = cfg.cost_unit;

  if (cfg.dh_override) {
    pc.dh = *cfg.dh_override;
  } else {
    const double theta = cfg.theta_ref ? *cfg.theta_ref : gbm_quantile(cfg.model, cfg.level);
    RngStream rng(cfg.base_seed, kDensityStream);
    const DensityEstimate density = estimate_density(cfg.model, theta, 100, 1000, 0.1, rng);
    if (density.value <= 0.0)
      throw ConfigError(
          "planner: estimated density at the root is zero; pin dh_override or "
          "increase the estimation budget");
    pc.dh = density.value / (1.0 - cfg.level);
  }
  pc.lambda_lower = cfg.schedule.lambda_lower.value_or(pc.dh);
  pc.gamma0 = cfg.planner_gamma0.value_or(1.0 / pc.lambda_lower);
  return pc;
}

int resolve_threads(const ExperimentConfig& cfg) {
  if (cfg.threads) return std::max(1, *cfg.threads);
  if (const char* env = std::getenv("RRSA_THREADS")) {
    int value = 0;
    const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), value);
    if (res.ec == std::errc() && value >= 1) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_index(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  threads = std::min(std::max(threads, 1), count);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count || failed.load(std::memory_order_relaxed)) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

BudgetPlan resolve_plan(const ExperimentConfig& cfg) {
  const int levels = cfg.mode == Mode::crude ? 1 : cfg.levels;
  if (cfg.epsilon) {
    const PlannerConstants pc = planner_constants(cfg);
    return cfg.mode == Mode::crude ? plan_crude(pc, *cfg.epsilon)
                                   : plan_rr(pc, levels, *cfg.epsilon);
  }
  BudgetPlan plan;
  plan.base_steps = *cfg.explicit_n;
  plan.steps = *cfg.explicit_steps;
  plan.levels = levels;
  plan.epsilon = 0.0;
  plan.predicted_cost = cost(plan, cfg.cost_unit);
  if (plan.base_steps < 1 || plan.steps < 1)
    throw ConfigError("config: n and M must be >= 1");
  return plan;
}

RunSummary execute_one(const ExperimentConfig& cfg, const BudgetPlan& plan,
                       double theta_star, int index) {
  const QuantileField field(cfg.level);
  const double start = cfg.theta0.value_or(cfg.model.x0);
  EngineOptions opt;
  opt.weak_order = cfg.weak_order;

  RunSummary summary;
  summary.index = index;
  summary.stream_id = cfg.base_seed + static_cast<std::uint64_t>(index);
  RngStream rng(cfg.base_seed, summary.stream_id);
  try {
    RunRecord rec;
    if (plan.levels == 1) {
      rec = run_crude(field, cfg.model, plan.base_steps, plan.steps, cfg.schedule, start,
                      rng, std::nullopt, opt);
    } else {
      std::vector<double> theta0(static_cast<std::size_t>(plan.levels), start);
      rec = run_rr(field, cfg.model, plan.base_steps, plan.levels, plan.steps, cfg.schedule,
                   theta0, cfg.coupling, rng, std::nullopt, opt);
    }
    summary.ok = true;
    summary.estimator = rec.estimator;
    summary.abs_error = std::abs(rec.estimator - theta_star);
    summary.fine_increments = rec.fine_increments;
    summary.elapsed_seconds = rec.elapsed_seconds;
  } catch (const DivergenceError& e) {
    summary.ok = false;
    summary.error = e.what();
  }
  return summary;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
  ExperimentReport report;
  report.plan = resolve_plan(cfg);
  report.theta_star = cfg.theta_ref ? *cfg.theta_ref : gbm_quantile(cfg.model, cfg.level);
  report.repetitions = cfg.repetitions;
  report.runs.resize(static_cast<std::size_t>(cfg.repetitions));

  const int threads = resolve_threads(cfg);
  parallel_for_index(cfg.repetitions, threads, [&](int i) {
    report.runs[static_cast<std::size_t>(i)] =
        execute_one(cfg, report.plan, report.theta_star, i);
  });

  // deterministic reduction, in run-index order
  double sum_abs = 0.0, sum_sq = 0.0, sum_elapsed = 0.0;
  for (const RunSummary& run : report.runs) {
    if (!run.ok) {
      report.partial = true;
      continue;
    }
    ++report.completed;
    sum_abs += run.abs_error;
    sum_sq += run.abs_error * run.abs_error;
    sum_elapsed += run.elapsed_seconds;
    report.total_fine_increments += run.fine_increments;
  }
  if (report.completed > 0) {
    const double n = static_cast<double>(report.completed);
    report.l1_error = sum_abs / n;
    report.mean_elapsed = sum_elapsed / n;
    if (report.completed > 1) {
      const double var = std::max(0.0, (sum_sq - n * report.l1_error * report.l1_error) /
                                           (n - 1.0));
      report.l1_std_error = std::sqrt(var / n);
    }
  }

  if (!cfg.out.empty()) write_text_file(cfg.out, experiment_csv(report));
  return report;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string experiment_csv(const ExperimentReport& report) {
  std::string out = "run,stream_id,status,estimator,abs_error,fine_increments\n";
  for (const RunSummary& run : report.runs) {
    out += std::to_string(run.index);
    out += ',';
    out += std::to_string(run.stream_id);
    out += ',';
    if (run.ok) {
      out += "ok,";
      out += format_double(run.estimator);
      out += ',';
      out += format_double(run.abs_error);
      out += ',';
      out += std::to_string(run.fine_increments);
    } else {
      out += "diverged,,,0";
    }
    out += '\n';
  }
  return out;
}

std::string table_report(const ExperimentConfig& base, std::span<const double> epsilons,
                         std::span<const Mode> modes) {
  std::string out = "epsilon,l1_error,time_s,R,n,M\n";
  for (const Mode mode : modes) {
    for (const double eps : epsilons) {
      ExperimentConfig cfg = base;
      cfg.mode = mode;
      cfg.epsilon = eps;
      cfg.explicit_n.reset();
      cfg.explicit_steps.reset();
      cfg.out.clear();
      const ExperimentReport report = run_experiment(cfg);
      out += format_double(eps);
      out += ',';
      out += format_double(report.l1_error);
      out += ',';
      out += format_double(report.mean_elapsed);
      out += ',';
      out += std::to_string(report.plan.levels);
      out += ',';
      out += std::to_string(report.plan.base_steps);
      out += ',';
      out += std::to_string(report.plan.steps);
      out += '\n';
    }
  }
  return out;
}

std::string bias_curve_csv(const ExperimentConfig& cfg, std::span<const int> levels_list,
                           int n_min, int n_max, std::int64_t steps) {
  if (n_min < 1 || n_max < n_min)
    throw ConfigError("bias-curve: need 1 <= n_min <= n_max");
  const QuantileField field(cfg.level);
  const double theta_star =
      cfg.theta_ref ? *cfg.theta_ref : gbm_quantile(cfg.model, cfg.level);
  std::vector<int> n_list;
  for (int n = n_min; n <= n_max; ++n) n_list.push_back(n);

  EngineOptions opt;
  opt.weak_order = cfg.weak_order;

  // one run per (R, n) row; rows are independent, so spread them on a pool
  std::vector<std::pair<int, int>> rows;
  for (int levels : levels_list)
    for (int n : n_list) rows.emplace_back(levels, n);
  std::vector<double> residuals(rows.size());
  parallel_for_index(static_cast<int>(rows.size()), resolve_threads(cfg), [&](int i) {
    const auto [levels, n] = rows[static_cast<std::size_t>(i)];
    const int lv[1] = {levels};
    const int nn[1] = {n};
    const auto points = bias_curve(field, cfg.model, lv, nn, steps, cfg.schedule,
                                   theta_star, cfg.base_seed,
                                   cfg.base_seed + static_cast<std::uint64_t>(i),
                                   cfg.coupling, opt);
    residuals[static_cast<std::size_t>(i)] = points.front().residual;
  });

  std::string out = "R,n,residual\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += std::to_string(rows[i].first);
    out += ',';
    out += std::to_string(rows[i].second);
    out += ',';
    out += format_double(residuals[i]);
    out += '\n';
  }
  return out;
}

VarianceComparison variance_compare(const ExperimentConfig& cfg, int levels, int n,
                                    std::int64_t steps, int seeds) {
  if (seeds < 2) throw ConfigError("variance-compare: seeds must be >= 2");
  const QuantileField field(cfg.level);
  const double start = cfg.theta0.value_or(cfg.model.x0);
  EngineOptions opt;
  opt.weak_order = cfg.weak_order;

  std::vector<double> shared(static_cast<std::size_t>(seeds));
  std::vector<double> independent(static_cast<std::size_t>(seeds));
  parallel_for_index(2 * seeds, resolve_threads(cfg), [&](int task) {
    const int i = task % seeds;
    const Coupling coupling = task < seeds ? Coupling::shared : Coupling::independent;
    std::vector<double> theta0(static_cast<std::size_t>(levels), start);
    const RunRecord rec =
        run_rr(field, cfg.model, n, levels, steps, cfg.schedule, theta0, coupling,
               RngStream(cfg.base_seed, cfg.base_seed + static_cast<std::uint64_t>(i)),
               std::nullopt, opt);
    (coupling == Coupling::shared ? shared : independent)[static_cast<std::size_t>(i)] =
        rec.estimator;
  });

  auto sample_variance = [](const std::vector<double>& xs) {
    const double n_d = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n_d;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / (n_d - 1.0);
  };

  VarianceComparison cmp;
  cmp.var_shared = sample_variance(shared);
  cmp.var_independent = sample_variance(independent);

  std::string csv = "coupling,run,estimator\n";
  for (int i = 0; i < seeds; ++i)
    csv += "shared," + std::to_string(i) + ',' +
           format_double(shared[static_cast<std::size_t>(i)]) + '\n';
  for (int i = 0; i < seeds; ++i)
    csv += "independent," + std::to_string(i) + ',' +
           format_double(independent[static_cast<std::size_t>(i)]) + '\n';
  csv += "shared,var," + format_double(cmp.var_shared) + '\n';
  csv += "independent,var," + format_double(cmp.var_independent) + '\n';
  cmp.csv = std::move(csv);
  return cmp;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path);
  out << text;
  if (!out) throw ConfigError("failed writing output file " + path);
}

}  // namespace rrsa
