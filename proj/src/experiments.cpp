#include "remest/experiments.hpp"

#include "remest/config.hpp"
#include "remest/constrained.hpp"
#include "remest/errors.hpp"
#include "remest/evaluation.hpp"
#include "remest/unconstrained.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <cmath>
#include <ctime>
#include <iostream>
#include <optional>
#include <sstream>

namespace remest {

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out = "-";
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<double> fmax;
};

struct CommandOptions {
  CommonOptions common;
  double lambda = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> fmax_grid{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  int theta_ref = 30;
  int delta_ref = 30;
  std::vector<int> theta_list{1, 20};
  std::vector<int> delta_list{5, 10, 15, 20};
  long horizon = 1'000'000;
};

// SOURCE_DATE_EPOCH pins the timestamp so reruns are byte-identical.
std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 40; ++i) g.push_back(0.5 * i);
  return g;
}

std::string kind_name(ConstrainedSolution::Kind k) {
  return k == ConstrainedSolution::Kind::Mixture ? "Mixture" : "Deterministic";
}

std::string join_thresholds(const ThresholdView& v) {
  std::string out;
  for (int t : v.distinct()) {
    if (!out.empty()) out += ';';
    out += t == ThresholdView::kNever ? "inf" : std::to_string(t);
  }
  return out;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ResultRecord new_record(const std::string& experiment, const SystemConfig& config,
                        std::vector<std::string> columns) {
  ResultRecord r;
  r.experiment = experiment;
  r.config_digest = config_digest(config);
  r.created_at = utc_now();
  r.columns = std::move(columns);
  return r;
}

CmdpOptions cmdp_options(const SystemConfig& c) {
  CmdpOptions o;
  o.epsilon_mix = c.tolerances.mixture;
  o.search_tolerance = c.tolerances.search;
  return o;
}

std::vector<Cell> solution_row(double f_max, const ConstrainedSolution& sol) {
  const double p = sol.kind == ConstrainedSolution::Kind::Mixture ? sol.mixture.p : 0.0;
  const double p_lin = sol.kind == ConstrainedSolution::Kind::Mixture ? sol.mixture.p_linear : 0.0;
  return {f_max,
          sol.achieved_J,
          sol.lambda_star,
          p,
          p_lin,
          kind_name(sol.kind),
          sol.achieved_F,
          static_cast<long long>(sol.trace.iterations())};
}

const std::vector<std::string> kSolveColumns{"f_max", "J_star", "lambda_star", "p", "p_linear",
                                             "kind", "F", "iterations"};

ResultRecord cmd_check(const SystemConfig& config) {
  const SystemModel model(config);
  const auto rep = check_assumption1(model);
  auto r = new_record("check", config, {"state", "Q_ii", "p_f", "limit_ratio", "bound", "holds"});
  for (int i = 0; i < model.alphabet(); ++i) {
    r.rows.push_back({static_cast<long long>(i), model.chain()(i, i), model.p_f(), rep.limit_ratio,
                      rep.bound_per_state[i], std::string(rep.holds_per_state[i] ? "true" : "false")});
  }
  r.metadata.emplace_back("assumption1", rep.holds ? "holds" : "fails");
  r.metadata.emplace_back("n_states", std::to_string(model.n_states()));
  return r;
}

ResultRecord cmd_solve(const SystemConfig& config) {
  const SystemModel model(config);
  const auto sol = solve_cmdp(model, config.f_max, config.lambda_max, cmdp_options(config));
  auto r = new_record("solve", config, kSolveColumns);
  r.rows.push_back(solution_row(config.f_max, sol));
  r.metadata.emplace_back("thresholds_plus", join_thresholds(sol.thresholds_plus));
  if (sol.kind == ConstrainedSolution::Kind::Mixture) {
    r.metadata.emplace_back("thresholds_minus", join_thresholds(sol.thresholds_minus));
    r.metadata.emplace_back("differing_states", std::to_string(sol.mixture.differing_states.size()));
  }
  return r;
}

ResultRecord cmd_solve_lambda(const SystemConfig& config, double lambda) {
  const SystemModel model(config);
  const auto res = spi_solve(model, lambda);
  auto r = new_record("solve-lambda", config, {"lambda", "F", "J", "L", "thresholds", "thresholds_digest", "iterations"});
  r.rows.push_back({lambda, res.value.f_component, res.value.j_component, res.value.gain,
                    join_thresholds(res.thresholds), hex_digest(policy_digest(res.policy)),
                    static_cast<long long>(res.iterations)});
  return r;
}

ResultRecord cmd_sweep(const SystemConfig& config, const std::vector<double>& grid) {
  const SystemModel model(config);
  auto r = new_record("sweep", config, {"lambda", "F", "J", "L", "thresholds_digest", "error"});
  for (const auto& o : sweep_lambda(model, grid)) {
    r.rows.push_back({o.lambda, o.F, o.J, o.L, o.error.empty() ? hex_digest(policy_digest(o.policy)) : std::string(),
                      o.error});
  }
  return r;
}

ResultRecord cmd_thresholds(const SystemConfig& config, const std::vector<double>& fmax_grid) {
  const SystemModel model(config);
  auto r = new_record("thresholds", config,
                      {"f_max", "kind", "lambda_star", "p", "thresholds_minus", "thresholds_plus", "F", "J"});
  for (double f : fmax_grid) {
    const auto sol = solve_cmdp(model, f, config.lambda_max, cmdp_options(config));
    const bool mix = sol.kind == ConstrainedSolution::Kind::Mixture;
    r.rows.push_back({f, kind_name(sol.kind), sol.lambda_star, mix ? sol.mixture.p : 0.0,
                      mix ? join_thresholds(sol.thresholds_minus) : std::string(),
                      join_thresholds(sol.thresholds_plus), sol.achieved_F, sol.achieved_J});
  }
  return r;
}

ResultRecord cmd_truncation(const SystemConfig& config, const CommandOptions& o) {
  auto r = new_record("truncation", config, {"theta_max", "delta_max", "kl", "support_mismatch"});
  std::vector<std::pair<int, int>> pairs;
  for (int t : o.theta_list)
    for (int d : o.delta_list) pairs.emplace_back(t, d);
  for (const auto& p : kl_study(config, o.theta_ref, o.delta_ref, pairs)) {
    r.rows.push_back({static_cast<long long>(p.theta_max), static_cast<long long>(p.delta_max), p.kl, p.mismatch});
  }
  r.metadata.emplace_back("reference", std::to_string(o.theta_ref) + "x" + std::to_string(o.delta_ref));
  r.metadata.emplace_back("projection", "theta>=theta_max folded onto theta_max; delta>=delta_max folded onto delta_max");
  r.metadata.emplace_back("distribution", "stationary distribution of the constrained solution; mixture kernel when randomized");
  return r;
}

ResultRecord cmd_compare(const SystemConfig& config, const std::vector<double>& fmax_grid) {
  SystemConfig zoh = config;
  zoh.theta_max = 1;
  zoh.estimator = EstimatorMode::Zoh;
  const SystemModel mm(config);
  const SystemModel mz(zoh);
  auto r = new_record("compare-estimators", config,
                      {"f_max", "J_map", "J_zoh", "lambda_map", "lambda_zoh", "kind_map", "kind_zoh"});
  for (double f : fmax_grid) {
    const auto a = solve_cmdp(mm, f, config.lambda_max, cmdp_options(config));
    const auto b = solve_cmdp(mz, f, config.lambda_max, cmdp_options(config));
    r.rows.push_back({f, a.achieved_J, b.achieved_J, a.lambda_star, b.lambda_star, kind_name(a.kind), kind_name(b.kind)});
  }
  r.metadata.emplace_back("zoh_digest", config_digest(zoh));
  return r;
}

ResultRecord cmd_simulate(const SystemConfig& config, long horizon) {
  const SystemModel model(config);
  const auto sol = solve_cmdp(model, config.f_max, config.lambda_max, cmdp_options(config));
  const auto stat = solution_metrics(model, sol);
  const SimReport rep = sol.kind == ConstrainedSolution::Kind::Mixture
                            ? simulate(model, sol.mixture, horizon, config.seed)
                            : simulate(model, sol.policy, horizon, config.seed);
  auto r = new_record("simulate", config,
                      {"horizon", "seed", "F_emp", "se_F", "J_model", "se_J_model", "J_strict", "se_J_strict",
                       "channel_rate", "se_channel", "F_stat", "J_stat"});
  r.rows.push_back({static_cast<long long>(rep.horizon), static_cast<long long>(rep.seed), rep.empirical_F, rep.se_F,
                    rep.empirical_J_model, rep.se_J_model, rep.empirical_J_strict, rep.se_J_strict,
                    rep.channel_success_rate, rep.se_channel, stat.F, stat.J});
  r.metadata.emplace_back("kind", kind_name(sol.kind));
  return r;
}

ResultRecord cmd_selftest(const SystemConfig& config, const std::vector<double>& grid, bool& all_passed) {
  const SystemModel model(config);
  const auto checks = run_selftest(model, grid);
  auto r = new_record("selftest", config, {"check", "passed", "detail"});
  int passed = 0;
  for (const auto& c : checks) {
    r.rows.push_back({c.name, std::string(c.passed ? "true" : "false"), c.detail});
    passed += c.passed;
  }
  all_passed = passed == static_cast<int>(checks.size());
  r.metadata.emplace_back("passed", std::to_string(passed));
  r.metadata.emplace_back("failed", std::to_string(checks.size() - passed));
  return r;
}

void report_error(std::ostream& err, const std::string& name, const std::string& cls, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = name;
  j["class"] = cls;
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

std::vector<SelfTestCheck> run_selftest(const SystemModel& model, const std::vector<double>& grid) {
  std::vector<SelfTestCheck> checks;
  auto add = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  };

  std::size_t violations = 0;
  double mono = 0.0, submod = 0.0, gap = 0.0, concavity = 0.0;
  bool f_monotone = true, j_monotone = true;
  std::vector<CurvePoint> curve;
  for (double lambda : grid) {
    const auto spi = spi_solve(model, lambda);
    violations += check_switching_structure(spi.policy, model).size();
    mono = std::max(mono, check_value_monotonicity(spi.value, model));
    submod = std::max(submod, check_submodularity(model, spi.value));
    const auto rvi = rvi_solve(model, lambda);
    gap = std::max(gap, std::abs(rvi.value.gain - spi.value.gain));
    curve.push_back({lambda, spi.value.j_component, spi.value.f_component, spi.value.gain});
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    f_monotone = f_monotone && curve[i].F <= curve[i - 1].F + 1e-9;
    j_monotone = j_monotone && curve[i].J >= curve[i - 1].J - 1e-9;
  }
  for (std::size_t i = 2; i < curve.size(); ++i) {
    const double h1 = curve[i - 1].lambda - curve[i - 2].lambda;
    const double h2 = curve[i].lambda - curve[i - 1].lambda;
    const double s1 = (curve[i - 1].L - curve[i - 2].L) / h1;
    const double s2 = (curve[i].L - curve[i - 1].L) / h2;
    concavity = std::max(concavity, s2 - s1);
  }
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
  };
  add("switching_structure", violations == 0, std::to_string(violations) + " violations");
  add("value_monotonicity", mono <= 1e-8, "max violation " + fmt(mono));
  add("submodularity", submod <= 1e-8, "max violation " + fmt(submod));
  add("spi_rvi_gain_agreement", gap <= 1e-6, "max gap " + fmt(gap));
  add("frequency_non_increasing", f_monotone, "over " + std::to_string(curve.size()) + " multipliers");
  add("error_cost_non_decreasing", j_monotone, "over " + std::to_string(curve.size()) + " multipliers");
  add("lagrangian_concave", concavity <= 1e-9, "max slope increase " + fmt(concavity));

  double closed = 0.0;
  for (int n : {2, 3, 5}) {
    for (double sigma : {0.05, 0.1, 1.0 / n}) {
      const MarkovChain chain(symmetric_chain_matrix(n, sigma));
      for (int k = 0; k <= 50; ++k) {
        closed = std::max(closed, (symmetric_power_closed_form(n, sigma, k) - chain.power(k)).cwiseAbs().maxCoeff());
      }
    }
  }
  add("symmetric_closed_form", closed <= 1e-12, "max deviation " + fmt(closed));
  return checks;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantics-aware remote estimation: CMDP solver and experiments", "remest"};
  app.require_subcommand(1);
  CommandOptions o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.common.config_path, "JSON configuration file")->required();
    sub->add_option("--out", o.common.out, "output file ('-' for stdout)");
    sub->add_option("--format", o.common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", o.common.seed, "override the configured seed");
    sub->add_option("--fmax", o.common.fmax, "override the configured f_max");
  };
  auto* check = app.add_subcommand("check", "validate the chain and the existence condition");
  auto* solve = app.add_subcommand("solve", "constrained optimum by intersection search");
  auto* solve_lambda = app.add_subcommand("solve-lambda", "lambda-optimal policy by structured policy iteration");
  auto* sweep = app.add_subcommand("sweep", "F, J, L over a lambda grid");
  auto* thresholds = app.add_subcommand("thresholds", "constrained solutions and thresholds over an f_max grid");
  auto* truncation = app.add_subcommand("truncation", "KL divergence of truncated solutions to a reference");
  auto* compare = app.add_subcommand("compare-estimators", "MAP versus ZOH optimal cost over an f_max grid");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the constrained solution");
  auto* selftest = app.add_subcommand("selftest", "structural conformance checks");
  for (auto* s : {check, solve, solve_lambda, sweep, thresholds, truncation, compare, sim, selftest}) add_common(s);
  solve_lambda->add_option("--lambda", o.lambda, "transmission cost")->required();
  sweep->add_option("--lambda-grid", o.lambda_grid, "ascending multipliers (default 0, 0.5, ..., 20)")->delimiter(',');
  selftest->add_option("--lambda-grid", o.lambda_grid, "multipliers to check (default 0, 0.5, ..., 20)")->delimiter(',');
  thresholds->add_option("--fmax-grid", o.fmax_grid, "frequency budgets")->delimiter(',');
  compare->add_option("--fmax-grid", o.fmax_grid, "frequency budgets")->delimiter(',');
  truncation->add_option("--theta-ref", o.theta_ref, "reference AoI truncation");
  truncation->add_option("--delta-ref", o.delta_ref, "reference AoCE truncation");
  truncation->add_option("--theta-list", o.theta_list, "AoI truncations")->delimiter(',');
  truncation->add_option("--delta-list", o.delta_list, "AoCE truncations")->delimiter(',');
  sim->add_option("--horizon", o.horizon, "number of slots (>= 1e4)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "UsageError", "usage", e.what());
    return kExitFailure;
  }

  try {
    SystemConfig config = load_config(o.common.config_path);
    if (o.common.seed) config.seed = *o.common.seed;
    if (o.common.fmax) {
      if (!(*o.common.fmax > 0.0 && *o.common.fmax <= 1.0)) throw ConfigError("--fmax must lie in (0, 1]");
      config.f_max = *o.common.fmax;
    }
    if (o.lambda_grid.empty()) o.lambda_grid = default_lambda_grid();
    const ResultFormat format = o.common.format == "json" ? ResultFormat::Json : ResultFormat::Csv;

    ResultRecord record;
    int code = kExitOk;
    if (*check) {
      record = cmd_check(config);
    } else if (*solve) {
      record = cmd_solve(config);
    } else if (*solve_lambda) {
      record = cmd_solve_lambda(config, o.lambda);
    } else if (*sweep) {
      record = cmd_sweep(config, o.lambda_grid);
    } else if (*thresholds) {
      record = cmd_thresholds(config, o.fmax_grid);
    } else if (*truncation) {
      record = cmd_truncation(config, o);
    } else if (*compare) {
      record = cmd_compare(config, o.fmax_grid);
    } else if (*sim) {
      record = cmd_simulate(config, o.horizon);
    } else if (*selftest) {
      bool ok = false;
      record = cmd_selftest(config, o.lambda_grid, ok);
      if (!ok) code = kExitFailure;
    }
    const std::string text = render_results({record}, format);
    if (o.common.out.empty() || o.common.out == "-") {
      out << text;
    } else {
      emit_results({record}, format, o.common.out);
    }
    return code;
  } catch (const Error& e) {
    switch (e.error_class()) {
      case ErrorClass::Validation:
        report_error(err, e.name(), "validation", e.what());
        return kExitValidation;
      case ErrorClass::Solver:
        report_error(err, e.name(), "solver", e.what());
        return kExitSolver;
      case ErrorClass::Io:
        report_error(err, e.name(), "io", e.what());
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    report_error(err, "InternalError", "internal", e.what());
  }
  return kExitFailure;
}

}  // namespace remest
