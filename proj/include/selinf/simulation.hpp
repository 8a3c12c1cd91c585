#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selinf/inference.hpp"

namespace selinf {

enum class Design { GaussianUnitNorm, Orthogonal, Custom };
std::string to_string(Design d);
Design design_from_string(const std::string& s);

/// "tg", "spacing", "spacing_conservative", "covariance", "max_t". "tg"
/// resolves to the TG test of the configured method.
TestKind test_from_string(const std::string& s, Method method);
std::string test_key(TestKind t);

struct SimConfig {
  std::size_t n = 50;
  std::size_t p = 100;
  /// Length p.
  VectorXd beta_star;
  double sigma = 1.0;
  Design design = Design::GaussianUnitNorm;
  /// Design matrix for Design::Custom (n x p).
  MatrixXd custom_x;
  std::size_t n_reps = 1000;
  std::size_t steps = 3;
  Method method = Method::LAR;
  std::vector<TestKind> tests;
  /// Interval level is 1 - alpha; intervals are computed when set.
  bool intervals = false;
  double alpha = 0.1;
  Sided sided = Sided::One;
  std::uint64_t seed = 1;
  /// 0 picks the hardware concurrency.
  std::size_t threads = 0;
  /// Draw a fresh X (normalized per draw) in every repetition.
  bool redraw_x = false;
  std::size_t max_t_sims = 1000;
  std::vector<double> power_cutoffs{0.05, 0.1, 0.2};

  /// Throws ArgumentError on inconsistent settings.
  void validate() const;
  /// Indices with beta_star != 0.
  std::vector<Index> support() const;
};

struct SimRecord {
  std::size_t rep = 0;
  std::size_t step = 0;
  TestKind test = TestKind::TG_FS;
  Index variable = 0;
  int sign = 0;
  double p_value = 1;
  std::optional<Interval> ci;
  /// e_k^T X_{A_k}^+ theta for the realized active list.
  double target = 0;
  /// Entered variable is in the true support.
  bool correct = false;
  /// The tested partial coefficient is zero.
  bool null_true = false;
};

struct Tally {
  std::size_t covered = 0;
  std::size_t missed = 0;
  std::size_t total() const { return covered + missed; }
};

/// Summary for one (step, test) pair. Selection classes: "correct" (entered
/// variable in the support), "incorrect", and "null" (incorrect with the
/// tested coefficient zero). Coverage classes are the variable names of the
/// support plus "other".
struct StepSummary {
  std::size_t step = 0;
  TestKind test = TestKind::TG_FS;
  std::map<std::string, std::vector<double>> qq;
  /// power[class][cutoff index]: fraction of p-values <= cutoff.
  std::map<std::string, std::vector<double>> power;
  Tally coverage;
  std::map<std::string, Tally> coverage_by_class;
};

struct SimReport {
  SimConfig config;
  std::vector<SimRecord> records;
  std::vector<StepSummary> summaries;
  /// Repetitions whose path stopped before config.steps.
  std::size_t early_terminations = 0;
  /// (rep, step, test) evaluations that raised; keyed by error text.
  std::map<std::string, std::size_t> failures;

  const StepSummary& summary(std::size_t step, TestKind test) const;
};

/// Runs every repetition on its own random stream; the report is identical
/// for any thread count.
SimReport run_simulation(const SimConfig& config);

/// Design matrix for a config; `stream` picks the random stream.
MatrixXd draw_design(const SimConfig& config, std::uint64_t stream);

struct KsResult {
  double statistic = 0;
  /// Asymptotic Kolmogorov p-value with the small-sample correction
  /// sqrt(n) + 0.12 + 0.11 / sqrt(n).
  double p_value = 1;
  bool pass_1pct = true;
  bool pass_5pct = true;
};

/// Two-sided one-sample KS test against Uniform(0, 1).
KsResult ks_uniformity(const std::vector<double>& pvalues);
/// One-sided KS against the alternative "stochastically smaller than
/// uniform": D+ = max(F_n(t) - t). Small D+ is consistent with
/// super-uniform p-values.
KsResult ks_super_uniformity(const std::vector<double>& pvalues);

}  // namespace selinf
