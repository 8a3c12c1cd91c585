// Command-line front end: path, infer, rules, simulate.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "selinf/errors.hpp"
#include "selinf/io.hpp"
#include "selinf/rng.hpp"

using namespace selinf;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2 };

struct DataArgs {
  std::string data;
  std::string response = "y";
  bool center = false;
  bool unit_norm = false;
  std::string method = "lar";
  std::size_t steps = 0;
  std::string output = "json";
};

struct InferArgs {
  std::vector<std::string> tests{"tg"};
  double alpha = 0.1;
  std::optional<double> sigma;
  std::string sided = "one";
  std::string ci_sided = "two";
  bool no_intervals = false;
  bool terminal_knot_zero = false;
  std::uint64_t seed = 1;
  std::size_t max_t_sims = 1000;
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--data", a.data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  cmd->add_option("--response", a.response, "Response column name")->capture_default_str();
  cmd->add_flag("--center", a.center, "Center y and the columns of X");
  cmd->add_flag("--unit-norm", a.unit_norm, "Scale the columns of X to unit norm");
  cmd->add_option("--method", a.method, "Path algorithm")
      ->check(CLI::IsMember({"fs", "lar", "lasso"}, CLI::ignore_case))
      ->capture_default_str();
  cmd->add_option("--steps", a.steps, "Number of path steps (default: as many as possible)");
  cmd->add_option("--output", a.output, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

void add_infer_options(CLI::App* cmd, InferArgs& a) {
  cmd->add_option("--test", a.tests, "tg, spacing, spacing_conservative, covariance, max_t")
      ->check(CLI::IsMember({"tg", "spacing", "spacing_conservative", "covariance", "max_t"}))
      ->capture_default_str();
  cmd->add_option("--alpha", a.alpha, "Level; intervals have coverage 1 - alpha")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--sigma", a.sigma, "Noise level (default: full least squares estimate)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sided", a.sided, "p-value sidedness")->check(CLI::IsMember({"one", "two"}))->capture_default_str();
  cmd->add_option("--ci-sided", a.ci_sided, "Interval sidedness")
      ->check(CLI::IsMember({"one", "two"}))
      ->capture_default_str();
  cmd->add_flag("--no-intervals", a.no_intervals, "Skip confidence intervals");
  cmd->add_flag("--terminal-knot-zero", a.terminal_knot_zero,
                "Use lambda = 0 after the last step when the active set is full");
  cmd->add_option("--seed", a.seed, "Seed for Monte Carlo tests")->capture_default_str();
  cmd->add_option("--max-t-sims", a.max_t_sims, "Monte Carlo draws for max_t")->capture_default_str();
}

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("--alpha must lie in (0, 1)");
}

std::size_t path_steps(const DataArgs& a, const Dataset& d) {
  if (a.steps > 0) return a.steps;
  return method_from_string(a.method) == Method::LASSO ? 4 * max_path_steps(d) : max_path_steps(d);
}

// `extra` more steps are run when available, for tests that look one knot
// ahead; only the requested steps are reported.
PathTrace run(const DataArgs& a, const Dataset& d, std::size_t extra = 0) {
  const Method m = method_from_string(a.method);
  std::size_t steps = path_steps(a, d);
  if (m != Method::LASSO) steps = std::min(steps + extra, std::max(steps, max_path_steps(d)));
  return run_path(m, d, steps);
}

bool looks_ahead(const InferArgs& a) {
  for (const auto& t : a.tests) {
    if (t == "covariance" || t == "spacing_conservative") return true;
  }
  return false;
}

TestOptions test_options(const InferArgs& a, const Dataset& d) {
  check_alpha(a.alpha);
  double sigma = 0;
  if (a.sigma) {
    sigma = *a.sigma;
  } else {
    if (d.n() <= d.p() + 1) {
      throw ArgumentError("--sigma is required: the full least squares estimate needs n > p + 1 (n = " +
                          std::to_string(d.n()) + ", p = " + std::to_string(d.p()) + ")");
    }
    sigma = estimate_sigma(d);
  }
  TestOptions o;
  o.cov = d.centered() ? CovarianceModel::centered(sigma) : CovarianceModel::iso(sigma);
  o.sided = sided_from_string(a.sided);
  o.ci_sided = sided_from_string(a.ci_sided);
  if (a.no_intervals) {
    o.alpha.reset();
  } else {
    o.alpha = a.alpha;
  }
  o.terminal_knot_zero = a.terminal_knot_zero;
  return o;
}

std::vector<InferenceResult> infer_all(const InferArgs& a, const Dataset& d, const PathTrace& t,
                                       std::size_t last, const TestOptions& o) {
  std::vector<InferenceResult> out;
  for (std::size_t k = 1; k <= std::min(last, t.size()); ++k) {
    if (t.steps[k - 1].kind == StepKind::Delete) continue;
    for (const std::string& name : a.tests) {
      switch (test_from_string(name, t.method)) {
        case TestKind::Spacing:
          out.push_back(spacing_test(d, t, k, o));
          break;
        case TestKind::SpacingConservative:
          out.push_back(conservative_spacing(d, t, k, o));
          break;
        case TestKind::Covariance:
          out.push_back(covariance_test(d, t, k, o));
          break;
        case TestKind::MaxT:
          out.push_back(max_t_test(d, t, k, o, a.max_t_sims, stream_seed(a.seed, k)));
          break;
        default:
          out.push_back(tg_test(d, t, k, o));
      }
    }
  }
  return out;
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_path(const DataArgs& a, const std::string& verify) {
  const Dataset d = parse_dataset(a.data, a.response, a.center, a.unit_norm);
  if (!verify.empty()) {
    std::ifstream in(verify);
    if (!in) throw DataError(verify + ": cannot open file");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw DataError(verify + ": " + e.what());
    }
    const PathTrace stored = trace_from_json(j);
    check_trace_matches(d, stored);
    const PathTrace fresh = run_path(stored.method, d, std::max<std::size_t>(stored.size(), 1));
    if (fresh.size() != stored.size()) throw ConsistencyError("path length differs from the stored trace");
    for (std::size_t l = 0; l < fresh.size(); ++l) {
      const PathStep &x = fresh.steps[l], &y = stored.steps[l];
      if (x.variable != y.variable || x.sign != y.sign || x.knot != y.knot || x.kind != y.kind) {
        throw ConsistencyError("step " + std::to_string(l + 1) + " differs from the stored trace");
      }
    }
    std::cerr << "verified: " << fresh.size() << " steps reproduce the stored trace\n";
    return kOk;
  }
  const PathTrace t = run(a, d);
  if (a.output == "csv") {
    std::cout << "step,action,variable,variable_index,sign,knot\n";
    for (std::size_t l = 0; l < t.size(); ++l) {
      const PathStep& st = t.steps[l];
      std::cout << l + 1 << ',' << (st.kind == StepKind::Add ? "add" : "delete") << ','
                << d.names()[static_cast<std::size_t>(st.variable)] << ',' << st.variable << ',' << st.sign << ','
                << (st.knot ? csv_real(*st.knot) : "") << '\n';
    }
  } else {
    emit(to_json(t, d.names()));
  }
  return kOk;
}

int cmd_infer(const DataArgs& a, const InferArgs& ia) {
  const Dataset d = parse_dataset(a.data, a.response, a.center, a.unit_norm);
  const TestOptions o = test_options(ia, d);
  const PathTrace t = run(a, d, looks_ahead(ia) ? 1 : 0);
  const auto results = infer_all(ia, d, t, path_steps(a, d), o);
  if (a.output == "csv") {
    std::cout << results_csv(results, d.names());
    return kOk;
  }
  Json j;
  j["method"] = to_string(t.method);
  j["n"] = d.n();
  j["p"] = d.p();
  j["sigma"] = o.cov.sigma;
  Json rs = Json::array();
  for (const auto& r : results) rs.push_back(to_json(r, d.names()));
  j["results"] = std::move(rs);
  emit(j);
  return kOk;
}

int cmd_rules(const DataArgs& a, InferArgs ia, const std::string& rule, std::size_t k) {
  const Dataset d = parse_dataset(a.data, a.response, a.center, a.unit_norm);
  ia.no_intervals = true;
  const TestOptions o = test_options(ia, d);
  const PathTrace full = run(a, d, looks_ahead(ia) ? 1 : 0);
  const PathTrace t = full.prefix(std::min(full.size(), path_steps(a, d)));
  RuleOutcome out;
  if (rule == "forward_stop") {
    if (ia.tests.size() != 1) throw ArgumentError("forward_stop takes a single --test");
    std::vector<double> ps;
    for (const auto& r : infer_all(ia, d, full, t.size(), o)) ps.push_back(r.p_value);
    if (ps.size() != t.size()) throw ArgumentError("forward_stop needs a path without deletion steps");
    out = forward_stop(t, ps, ia.alpha);
  } else {
    if (k == 0) k = t.size();
    out = bonferroni_at_k(d, t, k, o, ia.alpha);
  }
  if (a.output == "csv") {
    std::cout << "rule,alpha,k_chosen,rank,variable,variable_index\n";
    for (std::size_t i = 0; i < out.selected.size(); ++i) {
      std::cout << to_string(out.rule) << ',' << out.alpha << ',' << out.k_chosen << ',' << i + 1 << ','
                << d.names()[static_cast<std::size_t>(out.selected[i])] << ',' << out.selected[i] << '\n';
    }
  } else {
    emit(to_json(out, d.names()));
  }
  return kOk;
}

struct SimArgs {
  std::string config;
  std::optional<std::size_t> reps, threads, steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::vector<std::string> tests;
  bool intervals = false;
  std::string output = "json";
};

int cmd_simulate(const SimArgs& a) {
  Json j = Json::object();
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw DataError(a.config + ": cannot open file");
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw DataError(a.config + ": " + e.what());
    }
  }
  if (a.method) j["method"] = *a.method;
  if (!a.tests.empty()) j["tests"] = a.tests;
  if (a.reps) j["n_reps"] = *a.reps;
  if (a.threads) j["threads"] = *a.threads;
  if (a.steps) j["steps"] = *a.steps;
  if (a.seed) j["seed"] = *a.seed;
  if (a.intervals) j["intervals"] = true;
  const SimConfig c = sim_config_from_json(j);
  check_alpha(c.alpha);
  const SimReport r = run_simulation(c);
  if (a.output == "csv") {
    std::cout << records_csv(r);
  } else {
    emit(to_json(r));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact post-selection inference for forward stepwise, LAR and the lasso"};
  app.require_subcommand(1);

  DataArgs path_args, infer_args, rules_args;
  InferArgs infer_opts, rules_opts;
  std::string verify, rule = "forward_stop";
  std::size_t rule_k = 0;
  SimArgs sim;

  auto* path = app.add_subcommand("path", "Run a path algorithm and print its trace");
  add_data_options(path, path_args);
  path->add_option("--verify", verify, "Re-run the path and compare with a stored JSON trace")
      ->check(CLI::ExistingFile);

  auto* infer = app.add_subcommand("infer", "Per-step selective p-values and intervals");
  add_data_options(infer, infer_args);
  add_infer_options(infer, infer_opts);

  auto* rules = app.add_subcommand("rules", "Model selection from sequential p-values");
  add_data_options(rules, rules_args);
  add_infer_options(rules, rules_opts);
  rules->add_option("--rule", rule, "forward_stop or bonferroni")
      ->check(CLI::IsMember({"forward_stop", "bonferroni"}))
      ->capture_default_str();
  rules->add_option("--k", rule_k, "Step for bonferroni (default: last step)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of size, power and coverage");
  simulate->add_option("--config", sim.config, "JSON simulation config")->check(CLI::ExistingFile);
  simulate->add_option("--reps", sim.reps, "Override n_reps");
  simulate->add_option("--threads", sim.threads, "Worker threads (0: all cores)");
  simulate->add_option("--steps", sim.steps, "Override steps");
  simulate->add_option("--seed", sim.seed, "Override seed");
  simulate->add_option("--method", sim.method, "Override method")->check(CLI::IsMember({"fs", "lar", "lasso"}));
  simulate->add_option("--test", sim.tests, "Override tests");
  simulate->add_flag("--intervals", sim.intervals, "Compute confidence intervals");
  simulate->add_option("--output", sim.output, "json (summary) or csv (records)")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*path) return cmd_path(path_args, verify);
    if (*infer) return cmd_infer(infer_args, infer_opts);
    if (*rules) return cmd_rules(rules_args, rules_opts, rule, rule_k);
    return cmd_simulate(sim);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
