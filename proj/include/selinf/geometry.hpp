#pragma once

#include <vector>

#include "selinf/active_set.hpp"
#include "selinf/dataset.hpp"

namespace selinf {

struct PathTrace;

/// The active list A and signs s_A in force before a path step, with the
/// linear functionals of y that drive LAR and lasso:
///
///   c(j, s, A, s_A) = P_perp X_j / (s - X_j^T (X_A^+)^T s_A)
///   d(j, A, s_A)    = (X_A^+)^T e_j / (e_j^T (X_A^T X_A)^{-1} s_A)
///
/// c(j,s)^T y is the knot at which (j, s) would enter; d(j)^T y the knot at
/// which active variable j would leave.
class StepFrame {
 public:
  StepFrame(const Dataset& data, const std::vector<Index>& active,
            const std::vector<int>& signs);

  const ActiveSet& active() const { return act_; }
  const std::vector<int>& signs() const { return signs_; }
  /// (X_A^+)^T s_A; zero when A is empty.
  const VectorXd& equiangular() const { return w_; }

  /// s - X_j^T (X_A^+)^T s_A.
  double c_denominator(Index j, int s) const;
  VectorXd c_vector(Index j, int s) const;
  /// e_j^T (X_A^T X_A)^{-1} s_A for active j.
  double d_denominator(Index j) const;
  VectorXd d_vector(Index j) const;
  /// P_perp X_j.
  VectorXd residual_column(Index j) const { return act_.project_out(data_->X().col(j)); }

 private:
  const Dataset* data_;
  ActiveSet act_;
  std::vector<int> signs_;
  VectorXd w_;
  VectorXd g_;
};

/// Denominators below this magnitude drop the candidate (path) or the row
/// (polyhedra).
inline constexpr double kDenominatorTol = 1e-12;

/// Frame before step l (1-based) of the trace.
StepFrame frame_before(const Dataset& data, const PathTrace& trace, std::size_t l);

/// b_l with b_l^T y = lambda_l: c(j_l, s_l, ...) after an entry, d(j_l, ...)
/// after a deletion. LAR/lasso traces only.
VectorXd knot_functional(const Dataset& data, const PathTrace& trace, std::size_t l);

}  // namespace selinf
