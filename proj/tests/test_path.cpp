#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "selinf/errors.hpp"
#include "selinf/path.hpp"

using namespace selinf;

namespace {

// Orthonormal columns from a QR of a Gaussian matrix.
Dataset orthogonal_dataset(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const MatrixXd G = oracle::gaussian_matrix(n, p, rng);
  const MatrixXd Q = G.householderQr().householderQ() * MatrixXd::Identity(n, p);
  return Dataset(Q, oracle::gaussian_vector(n, rng, 2.0), {}, false, true);
}

}  // namespace

TEST_CASE("fs on the 2x2 identity") {
  Dataset d(MatrixXd::Identity(2, 2), VectorXd((VectorXd(2) << 3, -1).finished()));
  const PathTrace t = fs_path(d, 2);
  REQUIRE(t.size() == 2);
  CHECK(t.steps[0].variable == 0);
  CHECK(t.steps[0].sign == 1);
  CHECK(t.steps[1].variable == 1);
  CHECK(t.steps[1].sign == -1);
  CHECK(!t.steps[0].knot);
}

TEST_CASE("fs selection minimizes the refit RSS") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Dataset d = oracle::random_dataset(8, 5, seed, seed % 2 == 0);
    const PathTrace t = fs_path(d, 5);
    REQUIRE(t.size() == 5);
    std::vector<Index> active;
    for (const PathStep& st : t.steps) {
      double best = kInf;
      Index arg = -1;
      for (Index j = 0; j < d.p(); ++j) {
        if (std::find(active.begin(), active.end(), j) != active.end()) continue;
        auto cols = active;
        cols.push_back(j);
        const double r = oracle::rss(d.X(), d.y(), cols);
        if (r < best) best = r, arg = j;
      }
      CHECK(st.variable == arg);
      active.push_back(st.variable);
      // Sign is that of the entering partial coefficient.
      const VectorXd beta = oracle::ols(d.X(), d.y(), active);
      CHECK(st.sign == (beta[beta.size() - 1] > 0 ? 1 : -1));
      CHECK(st.active_after == active);
    }
  }
}

TEST_CASE("lar on an orthogonal design sorts |X^T y|") {
  const Dataset d = orthogonal_dataset(12, 6, 7);
  const PathTrace t = lar_path(d, 6);
  VectorXd score = (d.X().transpose() * d.y()).cwiseAbs();
  std::vector<Index> order(6);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return score[a] > score[b]; });
  REQUIRE(t.size() == 6);
  for (std::size_t l = 0; l < 6; ++l) {
    CHECK(t.steps[l].variable == order[l]);
    CHECK(*t.steps[l].knot == doctest::Approx(score[order[l]]).epsilon(1e-10));
  }
}

TEST_CASE("lar knots are nonincreasing, nonnegative and solve their ratio equation") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Dataset d = oracle::random_dataset(15, 8, 100 + seed);
    const PathTrace t = lar_path(d, 8);
    double prev = kInf;
    for (std::size_t l = 1; l <= t.size(); ++l) {
      const PathStep& st = t.steps[l - 1];
      const double lam = *st.knot;
      CHECK(lam <= prev);
      CHECK(lam >= 0);
      prev = lam;
      // Recompute lambda_l from the normal equations of the previous active set.
      const auto A = t.active_before(l);
      const auto s = t.signs_before(l);
      VectorXd resid = d.y();
      double a = 0;
      if (!A.empty()) {
        MatrixXd XA(d.n(), static_cast<Index>(A.size()));
        VectorXd sv(static_cast<Index>(A.size()));
        for (std::size_t i = 0; i < A.size(); ++i) XA.col(i) = d.X().col(A[i]), sv[i] = s[i];
        resid = d.y() - XA * oracle::ols(d.X(), d.y(), A);
        const VectorXd w = XA * (XA.transpose() * XA).ldlt().solve(sv);
        a = d.X().col(st.variable).dot(w);
      }
      const double expect = d.X().col(st.variable).dot(resid) / (st.sign - a);
      CHECK(std::abs(expect - lam) <= 1e-8 * std::max(1.0, std::abs(lam)));
      CHECK(std::find(st.competitors_add.begin(), st.competitors_add.end(),
                      SignedVar{st.variable, st.sign}) != st.competitors_add.end());
    }
  }
}

TEST_CASE("lar step 1 matches fs step 1 on unit-norm columns") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Dataset d = oracle::random_dataset(10, 6, 300 + seed);
    CHECK(lar_path(d, 1).steps[0].variable == fs_path(d, 1).steps[0].variable);
    CHECK(lar_path(d, 1).steps[0].sign == fs_path(d, 1).steps[0].sign);
  }
}

TEST_CASE("lasso equals lar on orthogonal designs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset d = orthogonal_dataset(10, 5, seed);
    const PathTrace a = lar_path(d, 5), b = lasso_path(d, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t l = 0; l < a.size(); ++l) {
      CHECK(b.steps[l].kind == StepKind::Add);
      CHECK(a.steps[l].variable == b.steps[l].variable);
      CHECK(*a.steps[l].knot == doctest::Approx(*b.steps[l].knot));
    }
  }
}

TEST_CASE("lasso deletions agree with coordinate descent") {
  int found = 0;
  for (std::uint64_t seed = 1; seed <= 4000 && found < 5; ++seed) {
    std::mt19937_64 rng(seed);
    MatrixXd X = oracle::gaussian_matrix(6, 3, rng);
    X.col(2) = 0.7 * X.col(0) + 0.7 * X.col(1) + 0.3 * X.col(2);
    const Dataset d = standardize(X, oracle::gaussian_vector(6, rng), {}, false, true);
    const PathTrace t = lasso_path(d, 8);
    const auto del = std::find_if(t.steps.begin(), t.steps.end(),
                                  [](const PathStep& s) { return s.kind == StepKind::Delete; });
    if (del == t.steps.end()) continue;
    ++found;
    const double lam = *del->knot;
    const Index j = del->variable;
    const VectorXd above = oracle::lasso_cd(d.X(), d.y(), lam * 1.001, {});
    const VectorXd below = oracle::lasso_cd(d.X(), d.y(), lam * 0.999, above);
    CHECK(std::abs(above[j]) > 0);
    CHECK(below[j] == 0);
    // Support and signs between consecutive knots match the trace.
    for (std::size_t l = 1; l < t.size(); ++l) {
      const double mid = 0.5 * (*t.steps[l - 1].knot + *t.steps[l].knot);
      const VectorXd beta = oracle::lasso_cd(d.X(), d.y(), mid, {});
      const auto& A = t.steps[l - 1].active_after;
      for (Index v = 0; v < d.p(); ++v) {
        const auto it = std::find(A.begin(), A.end(), v);
        if (it == A.end()) {
          CHECK(beta[v] == 0);
        } else {
          CHECK(beta[v] * t.steps[l - 1].signs_after[it - A.begin()] > 0);
        }
      }
    }
  }
  CHECK(found == 5);
}

TEST_CASE("active lists follow adds and deletes") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    std::mt19937_64 rng(seed);
    MatrixXd X = oracle::gaussian_matrix(8, 5, rng);
    X.col(4) = X.col(0) - 0.8 * X.col(1) + 0.2 * X.col(4);
    const Dataset d = standardize(X, oracle::gaussian_vector(8, rng), {}, false, true);
    const PathTrace t = lasso_path(d, 5);
    std::vector<Index> active;
    for (const PathStep& st : t.steps) {
      if (st.kind == StepKind::Add) {
        active.push_back(st.variable);
      } else {
        active.erase(std::find(active.begin(), active.end(), st.variable));
      }
      CHECK(st.active_after == active);
      CHECK(st.signs_after.size() == active.size());
    }
  }
}

TEST_CASE("argument and general-position errors") {
  const Dataset d = oracle::random_dataset(6, 4, 3);
  CHECK_THROWS_AS(fs_path(d, 0), ArgumentError);
  CHECK_THROWS_AS(lar_path(d, 5), ArgumentError);
  MatrixXd X = d.X();
  X.col(3) = X.col(0);
  const Dataset dup(X, d.y());
  CHECK_THROWS_AS(fs_path(dup, 4), GeneralPositionError);
  CHECK_THROWS_AS(lar_path(dup, 4), GeneralPositionError);
  CHECK_THROWS_AS(method_from_string("ridge"), ArgumentError);
  CHECK(method_from_string("LAR") == Method::LAR);
}

TEST_CASE("exact fs tie goes to the lower index with a diagnostic") {
  MatrixXd X = MatrixXd::Zero(3, 2);
  X(0, 0) = 1;
  X(1, 1) = 1;
  const Dataset d(X, VectorXd((VectorXd(3) << 1, 1, 0).finished()));
  const PathTrace t = fs_path(d, 1);
  CHECK(t.steps[0].variable == 0);
  CHECK(!t.steps[0].diagnostics.empty());
}

TEST_CASE("centered data caps the step count at n - 1") {
  std::mt19937_64 rng(5);
  const Dataset d = standardize(oracle::gaussian_matrix(5, 8, rng), oracle::gaussian_vector(5, rng), {},
                                true, true);
  CHECK(max_path_steps(d) == 4);
  CHECK(lar_path(d, 4).size() <= 4);
}
