#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace selinf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Fixed design X (n x p) with response y. Immutable once built.
class Dataset {
 public:
  /// Validates shapes, finiteness and the centering / unit-norm flags.
  /// Empty `names` are replaced by x1..xp.
  Dataset(MatrixXd X, VectorXd y, std::vector<std::string> names = {},
          bool centered = false, bool unit_norm = false);

  const MatrixXd& X() const { return X_; }
  const VectorXd& y() const { return y_; }
  const std::vector<std::string>& names() const { return names_; }
  bool centered() const { return centered_; }
  bool unit_norm() const { return unit_norm_; }
  Index n() const { return X_.rows(); }
  Index p() const { return X_.cols(); }

  /// Same design with a different response. Centering of the new response
  /// is the caller's business; the flag is re-validated.
  Dataset with_response(VectorXd y) const;

 private:
  MatrixXd X_;
  VectorXd y_;
  std::vector<std::string> names_;
  bool centered_;
  bool unit_norm_;
};

/// Center (columns of X and y) and/or scale columns of X to unit norm, then
/// build the dataset with the matching flags. Throws DataError on a zero-norm
/// column when unit_norm is requested.
Dataset standardize(MatrixXd X, VectorXd y, std::vector<std::string> names,
                    bool center, bool unit_norm);

}  // namespace selinf
