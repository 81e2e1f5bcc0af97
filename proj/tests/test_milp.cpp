#include "doctest.h"
#include "mpbenders/errors.hpp"
#include "mpbenders/milp.hpp"
#include "milp_support.hpp"

using namespace mpb;
using namespace testing_support;

TEST_CASE("rounding forced up") {
  MixedBinaryLp p;
  p.base = make_lp(Vec::Ones(1), Mat::Constant(1, 1, -1), Vec::Constant(1, -0.5), Mat(0, 1), Vec(0),
                   Vec::Zero(1), Vec::Ones(1));
  p.binary_idx = {0};
  auto s = solve_milp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(1.0));
}

TEST_CASE("two-item knapsack matches enumeration") {
  MixedBinaryLp p;
  Mat A(1, 2);
  A << 2, 3;
  Vec c(2);
  c << -3, -4;
  p.base = make_lp(c, A, Vec::Constant(1, 4), Mat(0, 2), Vec(0), Vec::Zero(2), Vec::Ones(2));
  p.binary_idx = {0, 1};
  auto s = solve_milp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(-s.objective == doctest::Approx(4.0));
  CHECK(s.x[0] == doctest::Approx(0.0));
  CHECK(s.x[1] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(enumerate_binaries(p)));
}

TEST_CASE("integral relaxation needs one node") {
  MixedBinaryLp p;
  Vec c(2);
  c << 1, -1;
  p.base = make_lp(c, Mat(0, 2), Vec(0), Mat(0, 2), Vec(0), Vec::Zero(2), Vec::Ones(2));
  p.binary_idx = {0, 1};
  auto s = solve_milp(p);
  CHECK(s.node_count == 1);
  CHECK(s.objective == doctest::Approx(-1.0));
}

TEST_CASE("infeasible binary problem") {
  MixedBinaryLp p;
  Mat A(2, 1);
  A << 1, -1;
  Vec b(2);
  b << 0.6, -0.4;
  p.base = make_lp(Vec::Ones(1), A, b, Mat(0, 1), Vec(0), Vec::Zero(1), Vec::Ones(1));
  p.binary_idx = {0};
  CHECK(solve_milp(p).status == LpStatus::Infeasible);
}

TEST_CASE("binary bounds are validated") {
  MixedBinaryLp p;
  p.base = make_lp(Vec::Ones(1), Mat(0, 1), Vec(0), Mat(0, 1), Vec(0), Vec::Zero(1), Vec::Constant(1, 2));
  p.binary_idx = {0};
  CHECK_THROWS_AS(solve_milp(p), DimensionMismatch);
}

TEST_CASE("random instances equal exhaustive enumeration; incumbents improve") {
  Gen g(31);
  for (int rep = 0; rep < 50; ++rep) {
    auto p = random_milp(g);
    auto s = solve_milp(p);
    const double oracle = enumerate_binaries(p);
    if (!std::isfinite(oracle)) {
      CHECK(s.status == LpStatus::Infeasible);
      continue;
    }
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(std::abs(s.objective - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
    for (int j : p.binary_idx) CHECK(std::abs(s.x[j] - std::round(s.x[j])) <= 1e-6);
    for (size_t k = 1; k < s.incumbent_history.size(); ++k)
      CHECK(s.incumbent_history[k] <= s.incumbent_history[k - 1]);
  }
}
