#include "selinf/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "selinf/errors.hpp"
#include "selinf/rng.hpp"

namespace selinf {

namespace {

constexpr std::uint64_t kDesignStream = ~0ULL;

bool is_tg(TestKind t) { return t == TestKind::TG_FS || t == TestKind::TG_LAR || t == TestKind::TG_LASSO; }

bool needs_next_knot(const SimConfig& c) {
  return std::any_of(c.tests.begin(), c.tests.end(), [](TestKind t) {
    return t == TestKind::Covariance || t == TestKind::SpacingConservative;
  });
}

bool unit_columns(const MatrixXd& X) {
  for (Index j = 0; j < X.cols(); ++j) {
    if (std::abs(X.col(j).norm() - 1.0) > 1e-10) return false;
  }
  return true;
}

std::vector<std::string> default_names(std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const ConsistencyError*>(&e)) return "consistency";
  if (dynamic_cast<const GeneralPositionError*>(&e)) return "general position";
  if (dynamic_cast<const ArgumentError*>(&e)) return "argument";
  return "other";
}

struct RepOutcome {
  std::vector<SimRecord> records;
  bool early = false;
  std::map<std::string, std::size_t> failures;
};

InferenceResult run_test(TestKind test, const Dataset& d, const PathTrace& t, std::size_t k, const TestOptions& o,
                         const SimConfig& c, std::uint64_t rep_stream) {
  switch (test) {
    case TestKind::TG_FS:
    case TestKind::TG_LAR:
    case TestKind::TG_LASSO:
      return tg_test(d, t, k, o);
    case TestKind::Spacing:
      return spacing_test(d, t, k, o);
    case TestKind::SpacingConservative:
      return conservative_spacing(d, t, k, o);
    case TestKind::Covariance:
      return covariance_test(d, t, k, o);
    case TestKind::MaxT:
      return max_t_test(d, t, k, o, c.max_t_sims, stream_seed(rep_stream, 100 + k));
  }
  throw ArgumentError("unknown test");
}

RepOutcome run_rep(const SimConfig& c, const MatrixXd& fixed_x, const std::vector<std::string>& names,
                   std::size_t rep) {
  RepOutcome out;
  const std::uint64_t rep_stream = stream_seed(c.seed, rep);
  const MatrixXd X = c.redraw_x ? draw_design(c, stream_seed(rep_stream, 1)) : fixed_x;
  const VectorXd theta = X * c.beta_star;
  SplitMix64 g(rep_stream);
  std::normal_distribution<double> z;
  VectorXd y(theta.size());
  for (Index i = 0; i < y.size(); ++i) y[i] = theta[i] + c.sigma * z(g);
  const Dataset d(X, y, names, false, unit_columns(X));

  std::size_t len = c.steps + (needs_next_knot(c) ? 1 : 0);
  if (c.method != Method::LASSO) len = std::min(len, max_path_steps(d));
  const PathTrace trace = run_path(c.method, d, len);
  out.early = trace.size() < c.steps;

  const auto support = c.support();
  TestOptions o;
  o.cov = CovarianceModel::iso(c.sigma);
  o.sided = c.sided;
  if (c.intervals) {
    o.alpha = c.alpha;
  } else {
    o.alpha.reset();
  }
  for (std::size_t k = 1; k <= std::min(c.steps, trace.size()); ++k) {
    const PathStep& st = trace.steps[k - 1];
    if (st.kind != StepKind::Add) continue;
    const Contrast v = step_contrast(d, trace, k, false, o.cov);
    const double target = v.v.dot(theta);
    SimRecord base;
    base.rep = rep;
    base.step = k;
    base.variable = st.variable;
    base.sign = st.sign;
    base.target = target;
    base.correct = std::find(support.begin(), support.end(), st.variable) != support.end();
    base.null_true = std::abs(target) <= 1e-9 * v.v.norm() * theta.norm();
    for (TestKind test : c.tests) {
      try {
        const InferenceResult r = run_test(test, d, trace, k, o, c, rep_stream);
        SimRecord rec = base;
        rec.test = test;
        rec.p_value = r.p_value;
        rec.ci = r.ci;
        out.records.push_back(rec);
      } catch (const std::exception& e) {
        ++out.failures[test_key(test) + ": " + error_kind(e) + " error"];
      }
    }
  }
  return out;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0) return 1.0;
  if (lambda < 1.18) {
    // P(K <= lambda) via the theta-function form, fast for small lambda.
    const double pi = 3.14159265358979323846;
    double s = 0;
    for (int j = 1; j <= 8; ++j) {
      const double t = (2 * j - 1) * pi / lambda;
      s += std::exp(-t * t / 8);
    }
    return 1.0 - std::sqrt(2 * pi) / lambda * s;
  }
  double s = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    s += (j % 2 ? 1 : -1) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2 * s, 0.0, 1.0);
}

KsResult ks_result(double d, std::size_t n, bool one_sided) {
  KsResult r;
  r.statistic = d;
  const double rn = std::sqrt(static_cast<double>(n));
  if (one_sided) {
    r.p_value = std::min(1.0, std::exp(-2 * static_cast<double>(n) * d * d));
  } else {
    r.p_value = kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d);
  }
  r.pass_1pct = r.p_value > 0.01;
  r.pass_5pct = r.p_value > 0.05;
  return r;
}

}  // namespace

std::string to_string(Design d) {
  switch (d) {
    case Design::GaussianUnitNorm:
      return "gaussian_iid_unitnorm";
    case Design::Orthogonal:
      return "orthogonal";
    case Design::Custom:
      return "custom";
  }
  return "?";
}

Design design_from_string(const std::string& s) {
  if (s == "gaussian_iid_unitnorm") return Design::GaussianUnitNorm;
  if (s == "orthogonal") return Design::Orthogonal;
  if (s == "custom") return Design::Custom;
  throw ArgumentError("unknown design '" + s + "'");
}

TestKind test_from_string(const std::string& s, Method method) {
  if (s == "tg") {
    switch (method) {
      case Method::FS:
        return TestKind::TG_FS;
      case Method::LAR:
        return TestKind::TG_LAR;
      case Method::LASSO:
        return TestKind::TG_LASSO;
    }
  }
  if (s == "spacing") return TestKind::Spacing;
  if (s == "spacing_conservative") return TestKind::SpacingConservative;
  if (s == "covariance") return TestKind::Covariance;
  if (s == "max_t") return TestKind::MaxT;
  throw ArgumentError("unknown test '" + s + "'");
}

std::string test_key(TestKind t) {
  switch (t) {
    case TestKind::TG_FS:
    case TestKind::TG_LAR:
    case TestKind::TG_LASSO:
      return "tg";
    case TestKind::Spacing:
      return "spacing";
    case TestKind::SpacingConservative:
      return "spacing_conservative";
    case TestKind::Covariance:
      return "covariance";
    case TestKind::MaxT:
      return "max_t";
  }
  return "?";
}

void SimConfig::validate() const {
  if (n < 1 || p < 1) throw ArgumentError("n and p must be positive");
  if (static_cast<std::size_t>(beta_star.size()) != p) throw ArgumentError("beta_star must have length p");
  if (!(sigma > 0)) throw ArgumentError("sigma must be positive");
  if (n_reps < 1) throw ArgumentError("n_reps must be at least 1");
  if (steps < 1) throw ArgumentError("steps must be at least 1");
  if (method != Method::LASSO && steps > std::min(n, p)) throw ArgumentError("steps exceeds min(n, p)");
  if (tests.empty()) throw ArgumentError("no tests requested");
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("alpha must lie in (0, 1)");
  for (double c : power_cutoffs) {
    if (!(c > 0 && c < 1)) throw ArgumentError("power cutoffs must lie in (0, 1)");
  }
  for (TestKind t : tests) {
    const bool lar_only =
        t == TestKind::Spacing || t == TestKind::SpacingConservative || t == TestKind::Covariance;
    if (lar_only && method != Method::LAR) throw ArgumentError(test_key(t) + " needs method lar");
    if (is_tg(t) && t != test_from_string("tg", method)) throw ArgumentError("TG test does not match the method");
  }
  if (design == Design::Orthogonal && n < p) throw ArgumentError("orthogonal design needs n >= p");
  if (design == Design::Custom) {
    if (static_cast<std::size_t>(custom_x.rows()) != n || static_cast<std::size_t>(custom_x.cols()) != p) {
      throw ArgumentError("custom design must be n x p");
    }
    if (redraw_x) throw ArgumentError("redraw_x does not apply to a custom design");
  }
}

std::vector<Index> SimConfig::support() const {
  std::vector<Index> s;
  for (Index j = 0; j < beta_star.size(); ++j) {
    if (beta_star[j] != 0) s.push_back(j);
  }
  return s;
}

const StepSummary& SimReport::summary(std::size_t step, TestKind test) const {
  for (const auto& s : summaries) {
    if (s.step == step && s.test == test) return s;
  }
  throw ArgumentError("no summary for step " + std::to_string(step) + " and test " + to_string(test));
}

MatrixXd draw_design(const SimConfig& c, std::uint64_t stream) {
  const Index n = static_cast<Index>(c.n), p = static_cast<Index>(c.p);
  if (c.design == Design::Custom) return c.custom_x;
  SplitMix64 g(stream);
  std::normal_distribution<double> z;
  MatrixXd G(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) G(i, j) = z(g);
  }
  if (c.design == Design::Orthogonal) return G.householderQr().householderQ() * MatrixXd::Identity(n, p);
  for (Index j = 0; j < p; ++j) G.col(j).normalize();
  return G;
}

SimReport run_simulation(const SimConfig& config) {
  config.validate();
  const MatrixXd fixed_x = config.redraw_x ? MatrixXd() : draw_design(config, stream_seed(config.seed, kDesignStream));
  const auto names = default_names(config.p);

  std::vector<RepOutcome> outcomes(config.n_reps);
  std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config.n_reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t rep; !failed && (rep = next++) < config.n_reps;) {
      try {
        outcomes[rep] = run_rep(config, fixed_x, names, rep);
      } catch (...) {
        // Errors outside the per-test guard (path or design) abort the run.
        if (!failed.exchange(true)) fatal = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);

  SimReport report;
  report.config = config;
  for (auto& o : outcomes) {
    report.early_terminations += o.early;
    for (const auto& [k, v] : o.failures) report.failures[k] += v;
    report.records.insert(report.records.end(), o.records.begin(), o.records.end());
  }

  const auto support = config.support();
  for (std::size_t k = 1; k <= config.steps; ++k) {
    for (TestKind test : config.tests) {
      StepSummary s;
      s.step = k;
      s.test = test;
      for (const auto& r : report.records) {
        if (r.step != k || r.test != test) continue;
        s.qq[r.correct ? "correct" : "incorrect"].push_back(r.p_value);
        if (!r.correct && r.null_true) s.qq["null"].push_back(r.p_value);
        s.qq["all"].push_back(r.p_value);
        if (r.ci) {
          const bool covered = r.ci->lo <= r.target && r.target <= r.ci->hi;
          const bool in_support = std::find(support.begin(), support.end(), r.variable) != support.end();
          const std::string cls = in_support ? names[static_cast<std::size_t>(r.variable)] : "other";
          (covered ? s.coverage.covered : s.coverage.missed)++;
          (covered ? s.coverage_by_class[cls].covered : s.coverage_by_class[cls].missed)++;
        }
      }
      for (auto& [cls, v] : s.qq) {
        std::sort(v.begin(), v.end());
        auto& pw = s.power[cls];
        for (double cut : config.power_cutoffs) {
          const auto hits = std::upper_bound(v.begin(), v.end(), cut) - v.begin();
          pw.push_back(v.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(v.size()));
        }
      }
      report.summaries.push_back(std::move(s));
    }
  }
  return report;
}

KsResult ks_uniformity(const std::vector<double>& pvalues) {
  if (pvalues.empty()) throw ArgumentError("ks_uniformity: empty sample");
  std::vector<double> v = pvalues;
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) d = std::max({d, (i + 1) / n - v[i], v[i] - i / n});
  return ks_result(d, v.size(), false);
}

KsResult ks_super_uniformity(const std::vector<double>& pvalues) {
  if (pvalues.empty()) throw ArgumentError("ks_super_uniformity: empty sample");
  std::vector<double> v = pvalues;
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) d = std::max(d, (i + 1) / n - v[i]);
  return ks_result(d, v.size(), true);
}

}  // namespace selinf
