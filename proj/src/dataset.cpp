#include "selinf/dataset.hpp"

#include <cmath>

#include "selinf/errors.hpp"

namespace selinf {

namespace {

void check_flags(const MatrixXd& X, const VectorXd& y, bool centered,
                 bool unit_norm) {
  const double n = static_cast<double>(X.rows());
  if (centered) {
    const double scale = std::max({1.0, X.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
    const double tol = 1e-10 * n * scale;
    for (Index j = 0; j < X.cols(); ++j) {
      if (std::abs(X.col(j).sum()) > tol) {
        throw ArgumentError("column " + std::to_string(j) + " is not centered");
      }
    }
    if (std::abs(y.sum()) > tol) throw ArgumentError("response is not centered");
  }
  if (unit_norm) {
    for (Index j = 0; j < X.cols(); ++j) {
      if (std::abs(X.col(j).norm() - 1.0) > 1e-10) {
        throw ArgumentError("column " + std::to_string(j) + " does not have unit norm");
      }
    }
  }
}

}  // namespace

Dataset::Dataset(MatrixXd X, VectorXd y, std::vector<std::string> names,
                 bool centered, bool unit_norm)
    : X_(std::move(X)),
      y_(std::move(y)),
      names_(std::move(names)),
      centered_(centered),
      unit_norm_(unit_norm) {
  if (X_.rows() < 1 || X_.cols() < 1) throw ArgumentError("design must have n >= 1 and p >= 1");
  if (y_.size() != X_.rows()) throw ArgumentError("response length does not match design rows");
  if (!X_.allFinite() || !y_.allFinite()) throw ArgumentError("non-finite entry in data");
  if (names_.empty()) {
    for (Index j = 0; j < X_.cols(); ++j) names_.push_back("x" + std::to_string(j + 1));
  }
  if (static_cast<Index>(names_.size()) != X_.cols()) {
    throw ArgumentError("number of column names does not match design columns");
  }
  check_flags(X_, y_, centered_, unit_norm_);
}

Dataset Dataset::with_response(VectorXd y) const {
  return Dataset(X_, std::move(y), names_, centered_, unit_norm_);
}

Dataset standardize(MatrixXd X, VectorXd y, std::vector<std::string> names,
                    bool center, bool unit_norm) {
  if (center) {
    X.rowwise() -= X.colwise().mean();
    y.array() -= y.mean();
  }
  if (unit_norm) {
    for (Index j = 0; j < X.cols(); ++j) {
      const double norm = X.col(j).norm();
      if (!(norm > 0.0)) {
        const std::string label =
            j < static_cast<Index>(names.size()) ? names[j] : std::to_string(j);
        throw DataError("column '" + label + "' has zero norm and cannot be scaled to unit norm");
      }
      X.col(j) /= norm;
    }
  }
  return Dataset(std::move(X), std::move(y), std::move(names), center, unit_norm);
}

}  // namespace selinf
