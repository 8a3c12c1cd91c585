#pragma once

#include <string>
#include <vector>

#include "selinf/dataset.hpp"
#include "selinf/path.hpp"

namespace selinf {

/// Which step and which constraint family produced a row.
struct RowTag {
  std::size_t step = 0;
  std::string family;
};

/// {y : gamma * y >= offset}.
struct Polyhedron {
  MatrixXd gamma;
  VectorXd offset;
  std::vector<RowTag> tags;
  std::vector<std::string> diagnostics;

  Index rows() const { return gamma.rows(); }
  /// gamma * y - offset.
  VectorXd slack(const VectorXd& y) const;
  bool contains(const VectorXd& y, double tol = 0.0) const;
  Index count_family(const std::string& family) const;
};

/// Selection event of the first k steps of a forward stepwise trace.
Polyhedron gamma_fs(const Dataset& data, const PathTrace& trace, std::size_t k);
/// LAR event: active lists, signs and competitor sets S_1..S_k.
Polyhedron gamma_lar(const Dataset& data, const PathTrace& trace, std::size_t k);
/// Lasso event: additionally the deletion sets and the add/delete order.
Polyhedron gamma_lasso(const Dataset& data, const PathTrace& trace, std::size_t k);
/// Dispatches on trace.method.
Polyhedron selection_polyhedron(const Dataset& data, const PathTrace& trace, std::size_t k);

/// Upper bound on the row count of each builder.
std::size_t row_bound(Method method, std::size_t p, std::size_t k);
std::size_t refined_row_bound(std::size_t p, std::size_t k);

/// Quantities attached to the entering pair (j_l, s_l) at LAR step l.
/// Each *_terms matrix holds one linear functional of y per competitor;
/// the scalar is its max (plus, zero) or min (minus) at the observed y.
struct MQuantities {
  double m_plus = -kInf;
  double m_minus = kInf;
  double m_zero = -kInf;
  MatrixXd plus_terms;
  MatrixXd minus_terms;
  MatrixXd zero_terms;
  /// Rows encoding membership of S_l that the other conditions do not
  /// already imply; each must be >= 0.
  MatrixXd s_rows;
};

MQuantities m_quantities(const Dataset& data, const PathTrace& trace, std::size_t l);

/// Ordered-knot chain, M+ at step k, M- and M0 at every step, and the
/// membership rows.
Polyhedron refined_lar_polyhedron(const Dataset& data, const PathTrace& trace, std::size_t k);

/// k+1 rows: c_l - c_{l+1} for l < k, then c_k twice; offset
/// (0, ..., 0, M+_k) depends on y through M+_k.
struct CompactSpacingRep {
  MatrixXd gamma;
  VectorXd offset;
  double m_plus = -kInf;

  bool contains(const VectorXd& y, double tol = 0.0) const;
};

CompactSpacingRep compact_spacing_rep(const Dataset& data, const PathTrace& trace, std::size_t k);

}  // namespace selinf
