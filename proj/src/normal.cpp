#include "selinf/normal.hpp"

#include <cmath>
#include <limits>

#include "selinf/errors.hpp"

namespace selinf {

namespace {

constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// exp(x^2) with x^2 split into an exact head and a rounding tail.
double exp_square(double x) {
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::exp(hi) * std::exp(lo);
}

// log(Q(hi) / Q(lo)) for 0 <= lo <= hi, Q the normal upper tail.
double log_tail_ratio(double lo, double hi) {
  if (std::isinf(hi)) return -std::numeric_limits<double>::infinity();
  return -(hi - lo) * (hi + lo) / 2 + std::log(erfcx(hi * kInvSqrt2) / erfcx(lo * kInvSqrt2));
}

// 20-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
constexpr double kGLx[10] = {0.0765265211334973337546404, 0.2277858511416450780804962,
                             0.3737060887154195606725482, 0.5108670019508270980043641,
                             0.6360536807265150254528367, 0.7463319064601507926143051,
                             0.8391169718222188233945291, 0.9122344282513259058677524,
                             0.9639719272779137912676661, 0.9931285991850949247861224};
constexpr double kGLw[10] = {0.1527533871307258506980843, 0.1491729864726037467878287,
                             0.1420961093183820513292983, 0.1316886384491766268984945,
                             0.1181945319615184173123774, 0.1019301198172404350367501,
                             0.0832767415767047487247581, 0.0626720483341090635695065,
                             0.0406014298003869413310400, 0.0176140071391521183118620};

// log of the mass of [lo, hi] with 0 <= lo < hi, by quadrature of the density
// relative to its value at lo. Used when the interval is narrow enough that
// the tail-ratio route would cancel.
double log_mass_quadrature(double lo, double hi) {
  const double c = (lo + hi) / 2, h = (hi - lo) / 2;
  double s = 0;
  for (int i = 0; i < 10; ++i) {
    for (double t : {c - h * kGLx[i], c + h * kGLx[i]}) s += kGLw[i] * std::exp(-(t - lo) * (t + lo) / 2);
  }
  return -lo * lo / 2 - kLogSqrt2Pi + std::log(s * h);
}

// Mass of [lo, hi] inside the upper half line.
double log_upper_mass(double lo, double hi) {
  const double w = hi - lo;
  if (std::isfinite(hi) && w <= 2.0 && w * (lo + hi) / 2 <= 1.0) return log_mass_quadrature(lo, hi);
  return log_normal_sf(lo) + std::log(-std::expm1(log_tail_ratio(lo, hi)));
}

}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0) {
    if (x < -26.5) return std::numeric_limits<double>::infinity();
    return 2 * exp_square(x) - erfcx(-x);
  }
  if (x < 26.0) return exp_square(x) * std::erfc(x);
  if (std::isinf(x)) return 0.0;
  // Continued fraction, evaluated backward; converges fast for large x.
  double t = x;
  for (int n = 60; n >= 1; --n) t = x + (n / 2.0) / t;
  return kInvSqrtPi / t;
}

double normal_pdf(double z) { return std::exp(-z * z / 2 - kLogSqrt2Pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

double log_normal_sf(double z) {
  if (z < 0) return std::log1p(-normal_sf(-z));
  if (std::isinf(z)) return -std::numeric_limits<double>::infinity();
  return -z * z / 2 + std::log(0.5 * erfcx(z * kInvSqrt2));
}

double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) {
    if (p == 0) return -std::numeric_limits<double>::infinity();
    if (p == 1) return std::numeric_limits<double>::infinity();
    throw ArgumentError("normal_quantile: probability outside [0, 1]");
  }
  // Acklam's rational approximation, then Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p > 1 - 0.02425) {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  for (int i = 0; i < 2; ++i) {
    const double e = (p < 0.5 ? normal_cdf(x) - p : (1 - p) - normal_sf(x));
    const double u = e / normal_pdf(x);
    x -= u / (1 + x * u / 2);
  }
  return x;
}

double log_normal_mass(double lo, double hi) {
  if (!(lo < hi)) throw ArgumentError("log_normal_mass: empty interval");
  if (lo >= 0) return log_upper_mass(lo, hi);
  if (hi <= 0) return log_upper_mass(-hi, -lo);
  // Straddles zero: both erf terms are positive, no cancellation.
  return std::log(0.5 * (std::erf(hi * kInvSqrt2) + std::erf(-lo * kInvSqrt2)));
}

}  // namespace selinf
