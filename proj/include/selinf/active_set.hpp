#pragma once

#include <Eigen/Dense>
#include <vector>

namespace selinf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thin QR factorization X_A = Q R of an ordered list of active columns,
/// updated one column at a time. All pseudoinverse applications go through
/// the factors; the Gram matrix is never formed.
class ActiveSet {
 public:
  explicit ActiveSet(const MatrixXd& X);

  /// Appends column j. Throws GeneralPositionError if its residual after
  /// projection is below 1e-12 times its norm.
  void add(Index j);
  /// Removes column j and refactors the remaining list (order preserved).
  void remove(Index j);

  const std::vector<Index>& columns() const { return cols_; }
  Index size() const { return static_cast<Index>(cols_.size()); }
  bool contains(Index j) const;
  /// Position of column j in the active list, or -1.
  Index position(Index j) const;

  /// P_perp v: residual of v after projecting out col(X_A).
  VectorXd project_out(const VectorXd& v) const;
  /// (X_A^+)^T w for a coefficient-space vector w (length |A|).
  VectorXd pinv_transpose(const VectorXd& w) const;
  /// X_A^+ v.
  VectorXd pinv(const VectorXd& v) const;
  /// (X_A^T X_A)^{-1} w.
  VectorXd gram_solve(const VectorXd& w) const;

 private:
  void append_column(Index j);

  const MatrixXd* X_;
  std::vector<Index> cols_;
  MatrixXd Q_;
  MatrixXd R_;
};

}  // namespace selinf
