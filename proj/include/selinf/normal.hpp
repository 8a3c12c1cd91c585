#pragma once

namespace selinf {

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// Standard normal density, CDF and upper tail.
double normal_pdf(double z);
double normal_cdf(double z);
double normal_sf(double z);
/// log of the upper tail 1 - Phi(z), finite for every finite z.
double log_normal_sf(double z);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// log of the standard normal mass of [lo, hi], lo < hi (extended reals).
/// Accurate in both tails and for narrow intervals.
double log_normal_mass(double lo, double hi);

}  // namespace selinf
