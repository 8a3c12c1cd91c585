#pragma once

#include <vector>

#include "selinf/inference.hpp"

namespace selinf {

enum class Rule { ForwardStop, BonferroniAtK };
std::string to_string(Rule r);

struct RuleOutcome {
  Rule rule = Rule::ForwardStop;
  /// Selected variable indices, in entry order.
  std::vector<Index> selected;
  std::size_t k_chosen = 0;
  double alpha = 0.1;
  std::vector<double> per_variable_p;
};

/// Largest k with (1/k) sum_{i<=k} -log(1 - p_i) <= alpha, or 0. A p-value
/// of 1 contributes +inf. The sequential p-values here are dependent, so
/// the FDR guarantee of this rule is heuristic.
RuleOutcome forward_stop(const std::vector<double>& pvalues, double alpha);

/// Applies forward_stop to per-step p-values and fills `selected` with the
/// variables entered at steps 1..k_chosen.
RuleOutcome forward_stop(const PathTrace& trace, const std::vector<double>& pvalues, double alpha);

/// For j = 1..k tests e_j^T X_{A_j}^+ theta against the step-k selection
/// event and keeps the variables with p < alpha / k.
RuleOutcome bonferroni_at_k(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts,
                            double alpha);

}  // namespace selinf
