#pragma once

// Test-side reference computations. Nothing here calls into the library's
// numerics except to read a trace back.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "selinf/dataset.hpp"
#include "selinf/path.hpp"

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd gaussian_matrix(Index n, Index p, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  MatrixXd X(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = z(rng);
  return X;
}

inline VectorXd gaussian_vector(Index n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = z(rng);
  return v;
}

inline selinf::Dataset random_dataset(Index n, Index p, std::uint64_t seed, bool unit_norm = true) {
  std::mt19937_64 rng(seed);
  MatrixXd X = gaussian_matrix(n, p, rng);
  VectorXd y = gaussian_vector(n, rng);
  return selinf::standardize(X, y, {}, false, unit_norm);
}

/// Residual sum of squares of the least-squares fit of y on the given columns.
inline double rss(const MatrixXd& X, const VectorXd& y, const std::vector<Index>& cols) {
  if (cols.empty()) return y.squaredNorm();
  MatrixXd XA(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) XA.col(static_cast<Index>(i)) = X.col(cols[i]);
  const VectorXd beta = XA.colPivHouseholderQr().solve(y);
  return (y - XA * beta).squaredNorm();
}

/// Least-squares coefficients of y on the given columns.
inline VectorXd ols(const MatrixXd& X, const VectorXd& y, const std::vector<Index>& cols) {
  MatrixXd XA(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) XA.col(static_cast<Index>(i)) = X.col(cols[i]);
  return XA.colPivHouseholderQr().solve(y);
}

/// c(j, s, A, s_A) from the normal equations.
inline VectorXd c_vector(const MatrixXd& X, const std::vector<Index>& A, const std::vector<int>& sA,
                         Index j, int s) {
  if (A.empty()) return s * X.col(j);
  MatrixXd XA(X.rows(), static_cast<Index>(A.size()));
  VectorXd sv(static_cast<Index>(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i) {
    XA.col(static_cast<Index>(i)) = X.col(A[i]);
    sv[static_cast<Index>(i)] = sA[i];
  }
  const auto gram = (XA.transpose() * XA).ldlt();
  const VectorXd resid = X.col(j) - XA * gram.solve(XA.transpose() * X.col(j));
  const double a = X.col(j).dot(XA * gram.solve(sv));
  return resid / (s - a);
}

/// Same conditioning event through step k: kinds, variables, signs, active
/// lists and (for LAR/lasso) competitor sets.
inline bool same_event(const selinf::PathTrace& a, const selinf::PathTrace& b, std::size_t k) {
  if (a.size() < k || b.size() < k) return false;
  for (std::size_t l = 0; l < k; ++l) {
    const auto& s = a.steps[l];
    const auto& t = b.steps[l];
    if (s.kind != t.kind || s.variable != t.variable || s.sign != t.sign) return false;
    if (s.active_after != t.active_after || s.signs_after != t.signs_after) return false;
    if (a.method == selinf::Method::FS) continue;
    std::set<selinf::SignedVar> sa(s.competitors_add.begin(), s.competitors_add.end());
    std::set<selinf::SignedVar> ta(t.competitors_add.begin(), t.competitors_add.end());
    std::set<Index> sd(s.competitors_del.begin(), s.competitors_del.end());
    std::set<Index> td(t.competitors_del.begin(), t.competitors_del.end());
    if (sa != ta || sd != td) return false;
  }
  return true;
}

/// Lasso solution at a single lambda by cyclic coordinate descent,
/// objective 0.5||y - X b||^2 + lambda ||b||_1.
inline VectorXd lasso_cd(const MatrixXd& X, const VectorXd& y, double lambda, VectorXd beta,
                         int max_sweeps = 100000, double tol = 1e-13) {
  const Index p = X.cols();
  if (beta.size() != p) beta = VectorXd::Zero(p);
  VectorXd r = y - X * beta;
  const VectorXd sq = X.colwise().squaredNorm();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0;
    for (Index j = 0; j < p; ++j) {
      const double old = beta[j];
      const double z = X.col(j).dot(r) + sq[j] * old;
      const double mag = std::max(std::abs(z) - lambda, 0.0);
      const double nb = z > 0 ? mag / sq[j] : -mag / sq[j];
      if (nb != old) {
        r -= X.col(j) * (nb - old);
        beta[j] = nb;
        change = std::max(change, std::abs(nb - old));
      }
    }
    if (change < tol) break;
  }
  return beta;
}

/// Adaptive Gauss-Kronrod (7-15) quadrature in long double. The tolerance
/// bounds the Gauss-Kronrod gap; the Kronrod value is far more accurate.
inline long double gauss_kronrod(const std::function<long double(long double)>& f, long double a,
                                 long double b, long double tol = 1e-13L, int depth = 0) {
  static const long double xk[8] = {0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
                                    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
                                    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
                                    0.207784955007898467600689403773245L, 0.0L};
  static const long double wk[8] = {0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
                                    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
                                    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
                                    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
  static const long double wg[4] = {0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
                                    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};
  const long double c = (a + b) / 2, h = (b - a) / 2;
  long double kron = wk[7] * f(c);
  long double gauss = wg[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const long double fx = f(c - h * xk[i]) + f(c + h * xk[i]);
    kron += wk[i] * fx;
    if (i % 2 == 1) gauss += wg[i / 2] * fx;
  }
  kron *= h;
  gauss *= h;
  if (depth > 30 || std::fabs(kron - gauss) <= tol * std::max(std::fabs(kron), 1e-4000L)) return kron;
  return gauss_kronrod(f, a, c, tol, depth + 1) + gauss_kronrod(f, c, b, tol, depth + 1);
}

/// Truncated normal CDF (upper = false) or survival (upper = true) by
/// quadrature of the density, computed relative to the density at the nearest
/// endpoint so deep tails keep full precision.
inline long double tn_quadrature(long double x, long double mu, long double sd, long double a, long double b,
                                 bool upper) {
  auto za = (a - mu) / sd, zb = (b - mu) / sd, zx = (x - mu) / sd;
  // Shift the exponent so the integrand is O(1) near the heavier endpoint.
  const long double anchor = (za > 0) ? za : ((zb < 0) ? zb : 0.0L);
  auto dens = [anchor](long double z) { return std::exp(-(z * z - anchor * anchor) / 2); };
  auto integral = [&](long double lo, long double hi) -> long double {
    if (lo >= hi) return 0;
    // Infinite ends are cut where the integrand is below 1e-40 of its peak.
    if (std::isinf(hi)) hi = std::max(lo, 0.0L) + 40.0L;
    if (std::isinf(lo)) lo = std::min(hi, 0.0L) - 40.0L;
    long double total = 0;
    const int pieces = 64;
    for (int i = 0; i < pieces; ++i) {
      const long double s = lo + (hi - lo) * i / pieces, t = lo + (hi - lo) * (i + 1) / pieces;
      total += gauss_kronrod(dens, s, t);
    }
    return total;
  };
  zx = std::clamp(zx, za, zb);
  const long double whole = integral(za, zb);
  return upper ? integral(zx, zb) / whole : integral(za, zx) / whole;
}

inline long double tn_cdf_quadrature(long double x, long double mu, long double sd, long double a, long double b) {
  return tn_quadrature(x, mu, sd, a, b, false);
}

inline long double tn_sf_quadrature(long double x, long double mu, long double sd, long double a, long double b) {
  return tn_quadrature(x, mu, sd, a, b, true);
}

/// Draw from N(mu, sd^2) truncated to [a, b]: plain rejection near the
/// center, exponential proposal in the tails.
inline double truncnorm_draw(double mu, double sd, double a, double b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double za = (a - mu) / sd, zb = (b - mu) / sd;
  if (za > 0.5 && zb > za) {
    // Robert's exponential rejection sampler on [za, zb].
    const double alpha = (za + std::sqrt(za * za + 4)) / 2;
    for (;;) {
      const double z = za - std::log(u(rng)) / alpha;
      if (z > zb) continue;
      if (u(rng) <= std::exp(-(z - alpha) * (z - alpha) / 2)) return mu + sd * z;
    }
  }
  if (zb < -0.5 && za < zb) return 2 * mu - truncnorm_draw(mu, sd, 2 * mu - b, 2 * mu - a, rng);
  std::normal_distribution<double> z;
  for (;;) {
    const double d = z(rng);
    if (d >= za && d <= zb) return mu + sd * d;
  }
}

/// Kolmogorov-Smirnov statistic against Uniform(0,1).
inline double ks_stat(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::max({d, (i + 1) / n - v[i], v[i] - i / n});
  }
  return d;
}

}  // namespace oracle
