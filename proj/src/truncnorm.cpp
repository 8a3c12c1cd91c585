#include "selinf/truncnorm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selinf/errors.hpp"
#include "selinf/normal.hpp"

namespace selinf {

namespace {

// log masses of [a, x] and [x, b] under N(mu, var), in standard units.
struct SplitMass {
  double lower;
  double upper;
  bool degenerate;
};

SplitMass split_mass(double x, double mu, double var, double a, double b) {
  if (!(var > 0) || !std::isfinite(var)) throw ArgumentError("truncated normal: variance must be positive");
  if (!(a < b)) throw ArgumentError("truncated normal: need a < b");
  const double sd = std::sqrt(var);
  const double za = (a - mu) / sd, zb = (b - mu) / sd;
  const double zx = std::clamp((x - mu) / sd, za, zb);
  if (!(za < zb)) return {0, 0, true};
  const double lower = zx > za ? log_normal_mass(za, zx) : -kInf;
  const double upper = zb > zx ? log_normal_mass(zx, zb) : -kInf;
  if (std::isinf(lower) && std::isinf(upper)) return {0, 0, true};
  return {lower, upper, false};
}

double linear_fraction(double x, double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return 0.5;
  return std::clamp((x - a) / (b - a), 0.0, 1.0);
}

}  // namespace

CovarianceModel CovarianceModel::iso(double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be positive and finite");
  return {Kind::Iso, sigma};
}

CovarianceModel CovarianceModel::centered(double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be positive and finite");
  return {Kind::CenteredIso, sigma};
}

VectorXd CovarianceModel::apply(const VectorXd& v) const {
  const double s2 = sigma * sigma;
  if (kind == Kind::Iso) return s2 * v;
  return s2 * (v.array() - v.mean()).matrix();
}

Contrast make_contrast(VectorXd v, const CovarianceModel& cov, std::string label) {
  const double var = v.dot(cov.apply(v));
  if (!(var > 0)) throw ArgumentError("contrast has zero variance under the covariance model");
  return Contrast{std::move(v), var, std::move(label)};
}

std::string to_string(Sided s) { return s == Sided::One ? "one" : "two"; }

Sided sided_from_string(const std::string& s) {
  if (s == "one") return Sided::One;
  if (s == "two") return Sided::Two;
  throw ArgumentError("sided must be 'one' or 'two', got '" + s + "'");
}

double tn_cdf(double x, double mu, double var, double a, double b) {
  if (x <= a) {
    split_mass(a, mu, var, a, b);  // validates arguments
    return 0.0;
  }
  if (x >= b) {
    split_mass(b, mu, var, a, b);
    return 1.0;
  }
  const SplitMass m = split_mass(x, mu, var, a, b);
  if (m.degenerate) return linear_fraction(x, a, b);
  if (std::isinf(m.lower)) return 0.0;
  return 1.0 / (1.0 + std::exp(m.upper - m.lower));
}

double tn_survival(double x, double mu, double var, double a, double b) {
  if (x <= a) {
    split_mass(a, mu, var, a, b);
    return 1.0;
  }
  if (x >= b) {
    split_mass(b, mu, var, a, b);
    return 0.0;
  }
  const SplitMass m = split_mass(x, mu, var, a, b);
  if (m.degenerate) return 1.0 - linear_fraction(x, a, b);
  if (std::isinf(m.upper)) return 0.0;
  return 1.0 / (1.0 + std::exp(m.lower - m.upper));
}

TruncationBounds truncation_limits(const MatrixXd& gamma, const VectorXd& offset, const CovarianceModel& cov,
                                   const Contrast& contrast, const VectorXd& y) {
  if (gamma.cols() != y.size() || contrast.v.size() != y.size() || offset.size() != gamma.rows()) {
    throw ArgumentError("truncation_limits: dimension mismatch");
  }
  if (!(contrast.variance > 0)) throw ArgumentError("truncation_limits: contrast variance must be positive");
  const VectorXd sv = cov.apply(contrast.v);
  const double sv_norm = sv.norm();
  const double vy = contrast.v.dot(y);
  const double y_norm = y.norm();
  TruncationBounds out;
  for (Index j = 0; j < gamma.rows(); ++j) {
    const double u = offset[j];
    if (u == -kInf) continue;
    const double gy = gamma.row(j).dot(y);
    const double g_norm = gamma.row(j).norm();
    const double slack = gy - u;
    if (slack < -1e-8 * (g_norm * y_norm + std::abs(u))) {
      std::ostringstream msg;
      msg << "response violates selection row " << j << " (slack " << slack << ")";
      throw ConsistencyError(msg.str());
    }
    const double gs = gamma.row(j).dot(sv);
    if (std::abs(gs) < 1e-12 * g_norm * sv_norm) {
      out.v_zero = std::max(out.v_zero, -slack);
      continue;
    }
    const double rho = gs / contrast.variance;
    const double t = vy - slack / rho;
    if (rho > 0) {
      out.v_lo = std::max(out.v_lo, t);
    } else {
      out.v_up = std::min(out.v_up, t);
    }
  }
  // Feasibility was checked above, so v_zero can only exceed 0 by rounding.
  out.v_zero = std::min(out.v_zero, 0.0);
  return out;
}

TruncationBounds truncation_limits(const Polyhedron& poly, const CovarianceModel& cov, const Contrast& contrast,
                                   const VectorXd& y) {
  return truncation_limits(poly.gamma, poly.offset, cov, contrast, y);
}

TruncationBounds truncation_limits(const CompactSpacingRep& rep, const CovarianceModel& cov,
                                   const Contrast& contrast, const VectorXd& y) {
  return truncation_limits(rep.gamma, rep.offset, cov, contrast, y);
}

namespace {

// Pulls stat into [lo, up] when it sits outside by rounding only.
double clamp_stat(double stat, double sd, const TruncationBounds& b) {
  const double tol = 1e-8 * std::max(sd, std::abs(stat));
  if (stat < b.v_lo - tol || stat > b.v_up + tol) {
    std::ostringstream msg;
    msg << "statistic " << stat << " outside truncation interval [" << b.v_lo << ", " << b.v_up << "]";
    throw ConsistencyError(msg.str());
  }
  return std::clamp(stat, b.v_lo, b.v_up);
}

bool collapsed(double sd, const TruncationBounds& b) { return !(b.v_up - b.v_lo > 1e-12 * sd); }

}  // namespace

double tn_pvalue(double stat, double contrast_var, const TruncationBounds& bounds, Sided sided) {
  if (!(contrast_var > 0)) throw ArgumentError("tn_pvalue: contrast variance must be positive");
  const double sd = std::sqrt(contrast_var);
  const double x = clamp_stat(stat, sd, bounds);
  if (collapsed(sd, bounds)) return 1.0;
  const double sf = tn_survival(x, 0.0, contrast_var, bounds.v_lo, bounds.v_up);
  if (sided == Sided::One) return sf;
  const double cdf = tn_cdf(x, 0.0, contrast_var, bounds.v_lo, bounds.v_up);
  return std::min(1.0, 2 * std::min(sf, cdf));
}

namespace {

// Solves survival(stat; mu) = target for mu. The survival function is
// nondecreasing in mu. At a truncation endpoint it is constant, and the root
// is the matching infinity.
double solve_mean(double x, double var, const TruncationBounds& b, double target) {
  const double sd = std::sqrt(var);
  auto sf = [&](double mu) { return tn_survival(x, mu, var, b.v_lo, b.v_up); };
  const double z = std::abs(normal_quantile(target)) + 1.0;
  double step = z * sd;
  double lo = x - step, hi = x + step;
  int expand = 0;
  while (sf(lo) > target) {
    if (++expand > 80) {
      if (x <= b.v_lo) return -kInf;
      throw NumericalError("interval inversion: cannot bracket the lower side");
    }
    step *= 2;
    lo = x - step;
  }
  step = z * sd;
  expand = 0;
  while (sf(hi) < target) {
    if (++expand > 80) {
      if (x >= b.v_up) return kInf;
      std::ostringstream msg;
      msg << "interval inversion: cannot bracket the upper side (stat " << x << ", bounds [" << b.v_lo << ", "
          << b.v_up << "], target " << target << ")";
      throw NumericalError(msg.str());
    }
    step *= 2;
    hi = x + step;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-8 * sd; ++it) {
    const double mid = lo + (hi - lo) / 2;
    (sf(mid) < target ? lo : hi) = mid;
  }
  return lo + (hi - lo) / 2;
}

}  // namespace

Interval tn_interval(double stat, double contrast_var, const TruncationBounds& bounds, double alpha,
                     Sided sided) {
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("alpha must lie in (0, 1)");
  if (!(contrast_var > 0)) throw ArgumentError("tn_interval: contrast variance must be positive");
  const double sd = std::sqrt(contrast_var);
  const double x = clamp_stat(stat, sd, bounds);
  if (collapsed(sd, bounds)) return {-kInf, kInf};
  if (sided == Sided::One) return {solve_mean(x, contrast_var, bounds, alpha), kInf};
  return {solve_mean(x, contrast_var, bounds, alpha / 2), solve_mean(x, contrast_var, bounds, 1 - alpha / 2)};
}

}  // namespace selinf
