#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "selinf/errors.hpp"
#include "selinf/rules.hpp"

using namespace selinf;

namespace {

TestOptions options() {
  TestOptions o;
  o.cov = CovarianceModel::iso(1.0);
  return o;
}

}  // namespace

TEST_CASE("forward stop on simple sequences") {
  CHECK(forward_stop(std::vector<double>(6, 0.0), 0.1).k_chosen == 6);
  CHECK(forward_stop({0.9}, 0.1).k_chosen == 0);
  CHECK(forward_stop({}, 0.1).k_chosen == 0);
  // -log(1 - p) running means: 0.01005, 0.2..., so only k = 1 qualifies.
  CHECK(forward_stop({0.01, 0.5, 0.3}, 0.1).k_chosen == 1);
  // Late small p-values can pull the average back under alpha.
  CHECK(forward_stop({0.0, 0.15, 0.0, 0.0}, 0.1).k_chosen == 4);
  // A p-value of exactly 1 blocks every later k.
  CHECK(forward_stop({0.0, 1.0, 0.0, 0.0, 0.0}, 0.1).k_chosen == 1);
  CHECK_THROWS_AS(forward_stop({0.2, 1.2}, 0.1), ArgumentError);
  CHECK_THROWS_AS(forward_stop({0.2}, 1.0), ArgumentError);
}

TEST_CASE("forward stop is monotone in each p-value") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<double> p(8);
    for (double& x : p) x = u(rng) * u(rng) * 0.5;
    const std::size_t k0 = forward_stop(p, 0.1).k_chosen;
    const std::size_t i = rng() % p.size();
    p[i] = p[i] + (1 - p[i]) * u(rng);
    CHECK(forward_stop(p, 0.1).k_chosen <= k0);
  }
}

TEST_CASE("forward stop selects the leading variables") {
  const Dataset d = oracle::random_dataset(20, 5, 3);
  const PathTrace t = lar_path(d, 4);
  const auto r = forward_stop(t, {0.0, 0.0, 0.9, 0.0}, 0.1);
  REQUIRE(r.k_chosen == 2);
  CHECK(r.selected == std::vector<Index>{t.steps[0].variable, t.steps[1].variable});
}

TEST_CASE("bonferroni at k = 1 is the step-1 test") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset d = oracle::random_dataset(20, 6, 60 + seed);
    const PathTrace t = lar_path(d, 2);
    const double p = tg_test(d, t, 1, options()).p_value;
    const auto r = bonferroni_at_k(d, t, 1, options(), 0.05);
    REQUIRE(r.per_variable_p.size() == 1);
    CHECK(r.per_variable_p[0] == doctest::Approx(p).epsilon(1e-12));
    CHECK(r.selected.size() == (p < 0.05 ? 1u : 0u));
  }
}

TEST_CASE("bonferroni selections shrink with alpha") {
  std::mt19937_64 rng(8);
  const Dataset base = oracle::random_dataset(30, 8, 81);
  for (int rep = 0; rep < 20; ++rep) {
    VectorXd beta = VectorXd::Zero(8);
    beta[0] = 4;
    beta[3] = -3;
    const Dataset d = base.with_response(base.X() * beta + oracle::gaussian_vector(30, rng));
    const PathTrace t = lar_path(d, 4);
    std::vector<Index> prev(8);
    std::iota(prev.begin(), prev.end(), 0);
    for (double a : {0.2, 0.1, 0.05, 0.01}) {
      auto sel = bonferroni_at_k(d, t, 4, options(), a).selected;
      for (Index j : sel) CHECK(std::find(prev.begin(), prev.end(), j) != prev.end());
      prev = sel;
    }
  }
}

TEST_CASE("bonferroni under the global null") {
  std::mt19937_64 rng(10);
  const Dataset base = oracle::random_dataset(25, 8, 91);
  const int reps = 400;
  double total = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const Dataset d = base.with_response(oracle::gaussian_vector(25, rng));
    const PathTrace t = lar_path(d, 3);
    total += static_cast<double>(bonferroni_at_k(d, t, 3, options(), 0.1).selected.size());
  }
  // E[#selections] <= alpha; allow three standard errors of a Poisson count.
  CHECK(total / reps <= 0.1 + 3 * std::sqrt(0.1 / reps));
}
