#include "selinf/active_set.hpp"

#include <algorithm>
#include <string>

#include "selinf/errors.hpp"

namespace selinf {

ActiveSet::ActiveSet(const MatrixXd& X) : X_(&X), Q_(X.rows(), 0), R_(0, 0) {}

bool ActiveSet::contains(Index j) const { return position(j) >= 0; }

Index ActiveSet::position(Index j) const {
  const auto it = std::find(cols_.begin(), cols_.end(), j);
  return it == cols_.end() ? -1 : static_cast<Index>(it - cols_.begin());
}

void ActiveSet::append_column(Index j) {
  const VectorXd x = X_->col(j);
  const Index k = size();
  // Classical Gram-Schmidt with one reorthogonalization pass.
  VectorXd q = x;
  VectorXd h = VectorXd::Zero(k);
  for (int pass = 0; pass < 2 && k > 0; ++pass) {
    const VectorXd dh = Q_.transpose() * q;
    q.noalias() -= Q_ * dh;
    h += dh;
  }
  const double norm = q.norm();
  if (!(norm > 1e-12 * x.norm())) {
    throw GeneralPositionError("column " + std::to_string(j) +
                               " lies in the span of the active columns (general position violated)");
  }
  Q_.conservativeResize(Eigen::NoChange, k + 1);
  Q_.col(k) = q / norm;
  R_.conservativeResize(k + 1, k + 1);
  R_.row(k).setZero();
  R_.col(k).head(k) = h;
  R_(k, k) = norm;
  cols_.push_back(j);
}

void ActiveSet::add(Index j) { append_column(j); }

void ActiveSet::remove(Index j) {
  std::vector<Index> keep;
  for (Index c : cols_) {
    if (c != j) keep.push_back(c);
  }
  cols_.clear();
  Q_.resize(X_->rows(), 0);
  R_.resize(0, 0);
  for (Index c : keep) append_column(c);
}

VectorXd ActiveSet::project_out(const VectorXd& v) const {
  if (cols_.empty()) return v;
  VectorXd r = v - Q_ * (Q_.transpose() * v);
  // Second pass keeps the residual orthogonal to working precision.
  r -= Q_ * (Q_.transpose() * r);
  return r;
}

VectorXd ActiveSet::pinv_transpose(const VectorXd& w) const {
  if (cols_.empty()) return VectorXd::Zero(X_->rows());
  const VectorXd t = R_.triangularView<Eigen::Upper>().transpose().solve(w);
  return Q_ * t;
}

VectorXd ActiveSet::pinv(const VectorXd& v) const {
  if (cols_.empty()) return VectorXd(0);
  return R_.triangularView<Eigen::Upper>().solve(Q_.transpose() * v);
}

VectorXd ActiveSet::gram_solve(const VectorXd& w) const {
  if (cols_.empty()) return VectorXd(0);
  const VectorXd t = R_.triangularView<Eigen::Upper>().transpose().solve(w);
  return R_.triangularView<Eigen::Upper>().solve(t);
}

}  // namespace selinf
