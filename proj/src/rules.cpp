#include "selinf/rules.hpp"

#include <algorithm>
#include <cmath>

#include "selinf/errors.hpp"

namespace selinf {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("alpha must lie in (0, 1)");
}

}  // namespace

std::string to_string(Rule r) { return r == Rule::ForwardStop ? "FORWARD_STOP" : "BONFERRONI_AT_K"; }

RuleOutcome forward_stop(const std::vector<double>& pvalues, double alpha) {
  check_alpha(alpha);
  RuleOutcome out;
  out.rule = Rule::ForwardStop;
  out.alpha = alpha;
  out.per_variable_p = pvalues;
  double sum = 0;
  for (std::size_t k = 1; k <= pvalues.size(); ++k) {
    const double p = pvalues[k - 1];
    if (!(p >= 0 && p <= 1)) throw ArgumentError("forward_stop: p-values must lie in [0, 1]");
    sum += p < 1 ? -std::log1p(-p) : kInf;
    if (sum / static_cast<double>(k) <= alpha) out.k_chosen = k;
  }
  return out;
}

RuleOutcome forward_stop(const PathTrace& trace, const std::vector<double>& pvalues, double alpha) {
  if (pvalues.size() > trace.size()) throw ArgumentError("forward_stop: more p-values than path steps");
  RuleOutcome out = forward_stop(pvalues, alpha);
  for (std::size_t l = 0; l < out.k_chosen; ++l) out.selected.push_back(trace.steps[l].variable);
  return out;
}

RuleOutcome bonferroni_at_k(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts,
                            double alpha) {
  check_alpha(alpha);
  if (k < 1 || k > trace.size()) throw ArgumentError("bonferroni_at_k: step outside the trace");
  RuleOutcome out;
  out.rule = Rule::BonferroniAtK;
  out.alpha = alpha;
  out.k_chosen = k;
  TestOptions o = opts;
  o.alpha.reset();
  const auto& final_active = trace.steps[k - 1].active_after;
  for (std::size_t j = 1; j <= k; ++j) {
    const PathStep& st = trace.steps[j - 1];
    if (st.kind != StepKind::Add) continue;
    const Contrast c = step_contrast(data, trace, j, o.sign_aligned, o.cov);
    const double p = tg_test(data, trace, k, c, o.sign_aligned ? st.sign : 1.0, o).p_value;
    out.per_variable_p.push_back(p);
    const bool still_active = std::find(final_active.begin(), final_active.end(), st.variable) != final_active.end();
    if (p < alpha / static_cast<double>(k) && still_active) out.selected.push_back(st.variable);
  }
  return out;
}

}  // namespace selinf
