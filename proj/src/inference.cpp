#include "selinf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "selinf/errors.hpp"
#include "selinf/geometry.hpp"
#include "selinf/polyhedra.hpp"
#include "selinf/rng.hpp"

namespace selinf {

namespace {

const PathStep& add_step(const Dataset& data, const PathTrace& trace, std::size_t k) {
  check_trace_matches(data, trace);
  if (k < 1 || k > trace.size()) {
    throw ArgumentError("step " + std::to_string(k) + " outside the trace (length " + std::to_string(trace.size()) +
                        ")");
  }
  const PathStep& st = trace.steps[k - 1];
  if (st.kind != StepKind::Add) {
    throw ArgumentError("step " + std::to_string(k) + " is a deletion; step tests apply to entering variables");
  }
  return st;
}

void require_lar(const PathTrace& trace, const char* test) {
  if (trace.method != Method::LAR) throw ArgumentError(std::string(test) + " needs a LAR trace");
}

TestKind tg_kind(Method m) {
  switch (m) {
    case Method::FS:
      return TestKind::TG_FS;
    case Method::LAR:
      return TestKind::TG_LAR;
    case Method::LASSO:
      return TestKind::TG_LASSO;
  }
  return TestKind::TG_FS;
}

// Interval for v^T theta mapped to v^T theta / scale.
Interval rescale(Interval iv, double scale) {
  if (scale > 0) return {iv.lo / scale, iv.hi / scale};
  return {iv.hi / scale, iv.lo / scale};
}

// lambda_{k+1}, or 0 past a saturated path when allowed.
double next_knot(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts) {
  if (trace.size() > k) return trace.knot(k + 1);
  const bool saturated = trace.steps[k - 1].active_after.size() >= max_path_steps(data);
  if (opts.terminal_knot_zero && saturated) return 0.0;
  throw ArgumentError("this test needs lambda_" + std::to_string(k + 1) + ": run the path for at least " +
                      std::to_string(k + 1) + " steps");
}

InferenceResult base_result(const Dataset& data, const PathTrace& trace, std::size_t k, const PathStep& st) {
  InferenceResult r;
  r.step = k;
  r.variable = st.variable;
  r.sign = st.sign;
  r.conditioning = describe_event(data, trace, k);
  return r;
}

}  // namespace

std::string to_string(TestKind t) {
  switch (t) {
    case TestKind::TG_FS:
      return "TG_FS";
    case TestKind::TG_LAR:
      return "TG_LAR";
    case TestKind::TG_LASSO:
      return "TG_LASSO";
    case TestKind::Spacing:
      return "SPACING";
    case TestKind::SpacingConservative:
      return "SPACING_CONSERVATIVE";
    case TestKind::Covariance:
      return "COVARIANCE";
    case TestKind::MaxT:
      return "MAX_T";
  }
  return "?";
}

Contrast step_contrast(const Dataset& data, const PathTrace& trace, std::size_t k, bool sign_aligned,
                       const CovarianceModel& cov) {
  const PathStep& st = add_step(data, trace, k);
  ActiveSet act(data.X());
  for (Index j : st.active_after) act.add(j);
  VectorXd e = VectorXd::Zero(act.size());
  e[act.position(st.variable)] = sign_aligned ? st.sign : 1.0;
  return make_contrast(act.pinv_transpose(e), cov, data.names()[static_cast<std::size_t>(st.variable)]);
}

std::string describe_event(const Dataset& data, const PathTrace& trace, std::size_t k) {
  const PathStep& st = trace.steps[k - 1];
  std::ostringstream out;
  out << to_string(trace.method) << " steps 1-" << k << ": active (";
  for (std::size_t i = 0; i < st.active_after.size(); ++i) {
    out << (i ? ", " : "") << data.names()[static_cast<std::size_t>(st.active_after[i])];
  }
  out << "), signs (";
  for (std::size_t i = 0; i < st.signs_after.size(); ++i) out << (i ? ", " : "") << (st.signs_after[i] > 0 ? '+' : '-');
  out << ")";
  if (trace.method == Method::FS) {
    out << ", entry order and signs";
  } else {
    out << ", competitor set sizes (";
    for (std::size_t l = 0; l < k; ++l) {
      out << (l ? ", " : "") << trace.steps[l].competitors_add.size();
      if (trace.method == Method::LASSO) out << "+" << trace.steps[l].competitors_del.size();
    }
    out << ")";
    if (trace.method == Method::LASSO) out << ", add/delete order";
  }
  return out.str();
}

InferenceResult tg_test(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts) {
  const PathStep& st = add_step(data, trace, k);
  const Contrast c = step_contrast(data, trace, k, opts.sign_aligned, opts.cov);
  return tg_test(data, trace, k, c, opts.sign_aligned ? st.sign : 1.0, opts);
}

InferenceResult tg_test(const Dataset& data, const PathTrace& trace, std::size_t k, const Contrast& contrast,
                        double coef_scale, const TestOptions& opts) {
  const PathStep& st = add_step(data, trace, k);
  const Polyhedron poly = selection_polyhedron(data, trace, k);
  InferenceResult r = base_result(data, trace, k, st);
  r.test = tg_kind(trace.method);
  r.sided = opts.sided;
  r.statistic = contrast.v.dot(data.y());
  const TruncationBounds b = truncation_limits(poly, opts.cov, contrast, data.y());
  r.bounds = b;
  r.p_value = tn_pvalue(r.statistic, contrast.variance, b, opts.sided);
  if (opts.alpha) r.ci = rescale(tn_interval(r.statistic, contrast.variance, b, *opts.alpha, opts.ci_sided), coef_scale);
  return r;
}

double spacing_weight(const Dataset& data, const PathTrace& trace, std::size_t k) {
  const PathStep& st = add_step(data, trace, k);
  const StepFrame before = frame_before(data, trace, k);
  const StepFrame after(data, st.active_after, st.signs_after);
  return (after.equiangular() - before.equiangular()).norm();
}

double spacing_pvalue(const SpacingInputs& in, double sigma) {
  if (!(in.omega > 0) || !(sigma > 0)) throw ArgumentError("spacing_pvalue: omega and sigma must be positive");
  const double sd = sigma / in.omega;
  if (!(in.lower < in.lambda_prev)) return 1.0;
  return tn_survival(in.lambda_k, 0.0, sd * sd, in.lower, in.lambda_prev);
}

double covariance_statistic(double omega, double lambda_k, double lambda_next, double sigma) {
  if (!(sigma > 0)) throw ArgumentError("covariance_statistic: sigma must be positive");
  return omega * omega * lambda_k * (lambda_k - lambda_next) / (sigma * sigma);
}

InferenceResult spacing_test(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts) {
  require_lar(trace, "spacing test");
  const PathStep& st = add_step(data, trace, k);
  const VectorXd v = knot_functional(data, trace, k);
  const Contrast c = make_contrast(v, opts.cov, data.names()[static_cast<std::size_t>(st.variable)]);
  const CompactSpacingRep rep = compact_spacing_rep(data, trace, k);
  InferenceResult r = base_result(data, trace, k, st);
  r.test = TestKind::Spacing;
  r.sided = opts.sided;
  r.conditioning = "LAR steps 1-" + std::to_string(k) + ": ordered knots and M+ bound at the last step";
  r.statistic = v.dot(data.y());
  const TruncationBounds b = truncation_limits(rep, opts.cov, c, data.y());
  r.bounds = b;
  r.p_value = tn_pvalue(r.statistic, c.variance, b, opts.sided);
  // v = kappa (X_{A_k}^+)^T e_k with kappa = v^T X_{j_k}.
  const double kappa = v.dot(data.X().col(st.variable));
  if (opts.alpha) r.ci = rescale(tn_interval(r.statistic, c.variance, b, *opts.alpha, opts.ci_sided), kappa);
  return r;
}

InferenceResult conservative_spacing(const Dataset& data, const PathTrace& trace, std::size_t k,
                                     const TestOptions& opts) {
  require_lar(trace, "conservative spacing test");
  const PathStep& st = add_step(data, trace, k);
  const double lambda_next = next_knot(data, trace, k, opts);
  const Contrast c = make_contrast(knot_functional(data, trace, k), opts.cov);
  InferenceResult r = base_result(data, trace, k, st);
  r.test = TestKind::SpacingConservative;
  r.sided = opts.sided;
  r.conditioning = "LAR steps 1-" + std::to_string(k) + ": ordered knots, lambda_" + std::to_string(k + 1) +
                   " as lower limit";
  r.statistic = trace.knot(k);
  const TruncationBounds b{lambda_next, trace.knot(k - 1), -kInf};
  r.bounds = b;
  r.p_value = tn_pvalue(r.statistic, c.variance, b, opts.sided);
  return r;
}

InferenceResult covariance_test(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts) {
  require_lar(trace, "covariance test");
  const PathStep& st = add_step(data, trace, k);
  const double lambda_next = next_knot(data, trace, k, opts);
  InferenceResult r = base_result(data, trace, k, st);
  r.test = TestKind::Covariance;
  r.sided = Sided::One;
  r.conditioning = "none (asymptotic Exp(1) reference)";
  r.statistic = covariance_statistic(spacing_weight(data, trace, k), trace.knot(k), lambda_next, opts.cov.sigma);
  r.p_value = std::min(1.0, std::exp(-r.statistic));
  return r;
}

InferenceResult max_t_test(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts,
                           std::size_t n_sim, std::uint64_t seed) {
  const PathStep& st = add_step(data, trace, k);
  if (n_sim < 1) throw ArgumentError("max_t_test: n_sim must be positive");
  const StepFrame frame = frame_before(data, trace, k);
  std::vector<VectorXd> cols;
  for (Index j = 0; j < data.p(); ++j) {
    if (frame.active().contains(j)) continue;
    const VectorXd r = frame.residual_column(j);
    const double nr = r.norm();
    if (nr > 1e-12 * data.X().col(j).norm()) cols.push_back(r / nr);
  }
  if (cols.empty()) throw ArgumentError("max_t_test: no candidate variables remain at step " + std::to_string(k));
  MatrixXd U(data.n(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) U.col(static_cast<Index>(i)) = cols[i];
  const double sigma = opts.cov.sigma;
  const double t_obs = (U.transpose() * data.y()).cwiseAbs().maxCoeff() / sigma;

  std::size_t exceed = 0;
  VectorXd eps(data.n());
  for (std::size_t i = 0; i < n_sim; ++i) {
    SplitMix64 g(stream_seed(seed, i));
    std::normal_distribution<double> z;
    for (Index r = 0; r < eps.size(); ++r) eps[r] = sigma * z(g);
    if (opts.cov.kind == CovarianceModel::Kind::CenteredIso) eps.array() -= eps.mean();
    if ((U.transpose() * eps).cwiseAbs().maxCoeff() / sigma > t_obs) ++exceed;
  }
  InferenceResult r = base_result(data, trace, k, st);
  r.test = TestKind::MaxT;
  r.sided = Sided::Two;
  r.conditioning = "none (max over variables outside the step-" + std::to_string(k - 1) + " active set)";
  r.statistic = t_obs;
  r.p_value = static_cast<double>(1 + exceed) / static_cast<double>(n_sim + 1);
  return r;
}

double estimate_sigma(const Dataset& data) {
  const Index n = data.n(), p = data.p();
  if (n <= p + 1) {
    throw ArgumentError("estimating sigma from the full least squares fit needs n > p + 1 (n = " + std::to_string(n) +
                        ", p = " + std::to_string(p) + "); supply sigma explicitly");
  }
  const VectorXd beta = data.X().colPivHouseholderQr().solve(data.y());
  const double rss = (data.y() - data.X() * beta).squaredNorm();
  const Index df = n - p - (data.centered() ? 1 : 0);
  return std::sqrt(rss / static_cast<double>(df));
}

}  // namespace selinf
