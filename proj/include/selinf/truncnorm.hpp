#pragma once

#include <string>

#include "selinf/dataset.hpp"
#include "selinf/polyhedra.hpp"

namespace selinf {

/// Noise covariance: sigma^2 I, or sigma^2 (I - 11^T/n) after centering.
struct CovarianceModel {
  enum class Kind { Iso, CenteredIso };
  Kind kind = Kind::Iso;
  double sigma = 1.0;

  static CovarianceModel iso(double sigma);
  static CovarianceModel centered(double sigma);
  /// Sigma * v.
  VectorXd apply(const VectorXd& v) const;
};

struct Contrast {
  VectorXd v;
  /// v^T Sigma v.
  double variance = 0;
  std::string label;
};

/// Throws ArgumentError when v^T Sigma v is not positive.
Contrast make_contrast(VectorXd v, const CovarianceModel& cov, std::string label = {});

struct TruncationBounds {
  double v_lo = -kInf;
  double v_up = kInf;
  double v_zero = -kInf;
};

enum class Sided { One, Two };
std::string to_string(Sided s);
Sided sided_from_string(const std::string& s);

/// CDF at x of N(mu, var) truncated to [a, b]; a < b extended reals, x is
/// clamped into [a, b].
double tn_cdf(double x, double mu, double var, double a, double b);
/// 1 - tn_cdf, computed directly.
double tn_survival(double x, double mu, double var, double a, double b);

/// Truncation limits of v^T y over {Gamma y >= offset}. Rows with offset
/// -inf impose nothing. Throws ConsistencyError if y violates a row.
TruncationBounds truncation_limits(const MatrixXd& gamma, const VectorXd& offset, const CovarianceModel& cov,
                                   const Contrast& contrast, const VectorXd& y);
TruncationBounds truncation_limits(const Polyhedron& poly, const CovarianceModel& cov, const Contrast& contrast,
                                   const VectorXd& y);
TruncationBounds truncation_limits(const CompactSpacingRep& rep, const CovarianceModel& cov,
                                   const Contrast& contrast, const VectorXd& y);

/// One-sided: survival at stat under mean 0 (alternative v^T theta > 0).
/// Two-sided: 2 min(F, 1 - F).
double tn_pvalue(double stat, double contrast_var, const TruncationBounds& bounds, Sided sided);

struct Interval {
  double lo = -kInf;
  double hi = kInf;
};

/// Pivot inversion. One-sided gives [delta_alpha, +inf); two-sided gives
/// [delta_{alpha/2}, delta_{1-alpha/2}]. Endpoints solve to 1e-8 sd.
Interval tn_interval(double stat, double contrast_var, const TruncationBounds& bounds, double alpha,
                     Sided sided);

}  // namespace selinf
