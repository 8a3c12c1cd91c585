#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "selinf/path.hpp"
#include "selinf/truncnorm.hpp"

namespace selinf {

enum class TestKind { TG_FS, TG_LAR, TG_LASSO, Spacing, SpacingConservative, Covariance, MaxT };

/// "TG_FS", "SPACING", ...
std::string to_string(TestKind t);

struct InferenceResult {
  std::size_t step = 0;
  Index variable = 0;
  int sign = 0;
  double statistic = 0;
  double p_value = 1;
  /// Interval for the partial coefficient e_k^T X_{A_k}^+ theta.
  std::optional<Interval> ci;
  std::optional<TruncationBounds> bounds;
  TestKind test = TestKind::TG_FS;
  Sided sided = Sided::One;
  std::string conditioning;
};

struct TestOptions {
  CovarianceModel cov;
  Sided sided = Sided::One;
  /// Contrast multiplied by the entry sign, so the one-sided alternative
  /// is "same sign as the fitted coefficient".
  bool sign_aligned = true;
  /// Intervals are skipped when alpha is absent.
  std::optional<double> alpha = 0.1;
  Sided ci_sided = Sided::Two;
  /// When the path ends with the active set saturated, take the next knot
  /// as 0 (the least squares end of the path) in tests that need it.
  bool terminal_knot_zero = false;
};

/// v = (X_{A_k}^+)^T e_k for the variable entered at step k, times s_k when
/// sign_aligned. Throws ArgumentError for deletion steps.
Contrast step_contrast(const Dataset& data, const PathTrace& trace, std::size_t k, bool sign_aligned,
                       const CovarianceModel& cov);

/// Human-readable description of the event conditioned on at step k.
std::string describe_event(const Dataset& data, const PathTrace& trace, std::size_t k);

/// Exact test of the step-k partial coefficient given the full selection
/// event through step k.
InferenceResult tg_test(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts);
/// Same conditioning, arbitrary contrast. `coef_scale` maps the contrast to
/// the reported parameter: the interval is for v^T theta / coef_scale.
InferenceResult tg_test(const Dataset& data, const PathTrace& trace, std::size_t k, const Contrast& contrast,
                        double coef_scale, const TestOptions& opts);

/// omega_k = ||(X_{A_k}^+)^T s_{A_k} - (X_{A_{k-1}}^+)^T s_{A_{k-1}}||.
double spacing_weight(const Dataset& data, const PathTrace& trace, std::size_t k);

struct SpacingInputs {
  double omega = 0;
  double lambda_prev = kInf;
  double lambda_k = 0;
  /// M+_k for the exact test, lambda_{k+1} for the conservative one.
  double lower = -kInf;
};

/// (Phi(l_prev w/s) - Phi(l_k w/s)) / (Phi(l_prev w/s) - Phi(lower w/s)),
/// evaluated through the stable truncated-normal survival function.
double spacing_pvalue(const SpacingInputs& in, double sigma);
/// omega^2 lambda_k (lambda_k - lambda_next) / sigma^2.
double covariance_statistic(double omega, double lambda_k, double lambda_next, double sigma);

/// LAR spacing test through the compact k+1 row representation.
InferenceResult spacing_test(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts);
/// Spacing statistic with lambda_{k+1} in place of M+_k; needs step k+1.
InferenceResult conservative_spacing(const Dataset& data, const PathTrace& trace, std::size_t k,
                                     const TestOptions& opts);
/// Covariance statistic with its Exp(1) p-value exp(-C_k); needs step k+1.
InferenceResult covariance_test(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts);

/// Monte Carlo max-|t| test over the variables outside A_{k-1}. p-value
/// (1 + #{t_max(eps) > t_max(y)}) / (n_sim + 1); draw i uses its own
/// stream derived from (seed, i).
InferenceResult max_t_test(const Dataset& data, const PathTrace& trace, std::size_t k, const TestOptions& opts,
                           std::size_t n_sim, std::uint64_t seed);

/// Residual standard deviation of the full least squares fit. Needs
/// n > p + 1. Degrees of freedom n - p, less one more when centered.
double estimate_sigma(const Dataset& data);

}  // namespace selinf
