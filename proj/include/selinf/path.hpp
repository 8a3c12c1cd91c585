#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "selinf/dataset.hpp"

namespace selinf {

enum class Method { FS, LAR, LASSO };
enum class StepKind { Add, Delete };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A (variable, sign) pair competing to enter.
struct SignedVar {
  Index var = 0;
  int sign = 1;
  friend bool operator==(const SignedVar&, const SignedVar&) = default;
  friend auto operator<=>(const SignedVar&, const SignedVar&) = default;
};

struct PathStep {
  StepKind kind = StepKind::Add;
  Index variable = 0;
  /// +1/-1 for an add; 0 for a delete.
  int sign = 0;
  /// Knot lambda_l. Absent for forward stepwise.
  std::optional<double> knot;
  std::vector<Index> active_after;
  std::vector<int> signs_after;

  /// S_l (LAR) or S_l^add (lasso): pairs whose entry knot is <= lambda_{l-1}.
  std::vector<SignedVar> competitors_add;
  /// S_l^del (lasso): active variables whose zero-crossing is <= lambda_{l-1}.
  std::vector<Index> competitors_del;

  /// Lasso bookkeeping: the best entering pair and best leaving variable,
  /// with the knots at which they would act (-inf when the set is empty).
  std::optional<SignedVar> add_choice;
  double knot_add = -kInf;
  std::optional<Index> del_choice;
  double knot_del = -kInf;

  /// Candidates never put in competition: vanishing denominators, the
  /// variable that just entered (deletion side) or just left (entry side).
  std::vector<SignedVar> excluded_add;
  std::vector<Index> excluded_del;

  std::vector<std::string> diagnostics;
};

struct PathTrace {
  Method method = Method::FS;
  std::vector<PathStep> steps;
  Index n = 0;
  Index p = 0;
  /// Why the path stopped before max_steps, empty otherwise.
  std::string termination;

  std::size_t size() const { return steps.size(); }
  std::size_t add_steps() const;
  /// Active list before step l (1-based); empty for l = 1.
  std::vector<Index> active_before(std::size_t l) const;
  std::vector<int> signs_before(std::size_t l) const;
  /// lambda_l with lambda_0 = +inf.
  double knot(std::size_t l) const;
  /// First l steps.
  PathTrace prefix(std::size_t l) const;
};

/// Forward stepwise: at each step adds the variable giving the largest drop
/// in residual sum of squares.
PathTrace fs_path(const Dataset& data, std::size_t max_steps);

/// Least angle regression, recording knots and competitor sets.
PathTrace lar_path(const Dataset& data, std::size_t max_steps);

/// LAR with the lasso modification (variables leave when their coefficient
/// crosses zero). Add/delete ties resolve to delete. Deletions make the path
/// longer than min(n, p), so max_steps is only required to be positive; the
/// run stops when no action is left at a nonnegative knot.
PathTrace lasso_path(const Dataset& data, std::size_t max_steps);

PathTrace run_path(Method method, const Dataset& data, std::size_t max_steps);

/// Largest admissible step count for FS and LAR: min(n - [centered], p).
/// This is also the largest active set any path can hold.
std::size_t max_path_steps(const Dataset& data);

/// Whether a variable can still enter an active set of the given size.
bool entry_possible(const Dataset& data, std::size_t active_size);

/// Throws ArgumentError unless the trace was produced from a dataset with
/// the same dimensions.
void check_trace_matches(const Dataset& data, const PathTrace& trace);

}  // namespace selinf
