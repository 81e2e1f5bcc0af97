#include <optional>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mp_support.hpp"
#include "mpbenders/errors.hpp"
#include "mpbenders/mp_io.hpp"
#include "mpbenders/mplp.hpp"

using namespace mpb;
using namespace testing_support;

namespace {

// min x s.t. x >= t, x <= 10, t in [0, 1].
MpLp follow_theta() {
  MpLp p;
  p.c = Vec::Ones(1);
  p.H = Mat::Zero(1, 1);
  p.A = Mat(2, 1);
  p.A << -1, 1;
  p.b = Vec(2);
  p.b << 0, 10;
  p.F = Mat(2, 1);
  p.F << -1, 0;
  p.A_eq = Mat(0, 1);
  p.b_eq = Vec(0);
  p.F_eq = Mat(0, 1);
  return box_theta(p, Vec::Zero(1), Vec::Ones(1));
}

// min t x, x in [0, 1], t in [-1, 1].
MpLp sign_switch() {
  MpLp p;
  p.c = Vec::Zero(1);
  p.H = Mat::Ones(1, 1);
  p.A = Mat(2, 1);
  p.A << 1, -1;
  p.b = Vec(2);
  p.b << 1, 0;
  p.F = Mat::Zero(2, 1);
  p.A_eq = Mat(0, 1);
  p.b_eq = Vec(0);
  p.F_eq = Mat(0, 1);
  return box_theta(p, Vec::Constant(1, -1), Vec::Ones(1));
}

// min x1 + x2 s.t. x1 >= t1, x2 >= t2, x1 + x2 >= 1, t in [0, 1]^2.
MpLp two_floors() {
  MpLp p;
  p.c = Vec::Ones(2);
  p.H = Mat::Zero(2, 2);
  p.A = Mat(3, 2);
  p.A << -1, 0, 0, -1, -1, -1;
  p.b = Vec(3);
  p.b << 0, 0, -1;
  p.F = Mat(3, 2);
  p.F << -1, 0, 0, -1, 0, 0;
  p.A_eq = Mat(0, 2);
  p.b_eq = Vec(0);
  p.F_eq = Mat(0, 2);
  return box_theta(p, Vec::Zero(2), Vec::Ones(2));
}

std::optional<int> strict_locate(const MpSolution& sol, const Vec& t) {
  for (size_t v = 0; v < sol.regions.size(); ++v)
    if (sol.regions[v].contains(t, 0.0)) return static_cast<int>(v);
  return std::nullopt;
}

double lp_value(const MpLp& p, const Vec& t, LpStatus* st = nullptr) {
  const LpSolution s = solve_lp(p.at(t));
  if (st) *st = s.status;
  return s.objective;
}

}  // namespace

TEST_CASE("single region follows the parameter") {
  const MpLp p = follow_theta();
  const MpSolution sol = enumerate_regions(p);
  REQUIRE(sol.regions.size() == 1);
  const CriticalRegion& r = sol.regions[0];
  for (double t : {0.0, 0.4, 1.0}) {
    const Vec th = Vec::Constant(1, t);
    CHECK(locate_region(sol, th) == 0);
    CHECK(evaluate_primal(r, th)[0] == doctest::Approx(t));
    CHECK(evaluate_value(r, p, th) == doctest::Approx(t));
    CHECK(evaluate_duals(r, th)[0] == doctest::Approx(1.0));
  }
  CHECK(r.active_set == std::vector<int>{0});
  CHECK(r.cheb_radius == doctest::Approx(0.5));
  CHECK_THROWS_AS(locate_region(sol, Vec::Constant(1, 1.5)), NoRegionFound);
}

TEST_CASE("sign of the cost splits the parameter line") {
  const MpLp p = sign_switch();
  const MpSolution sol = enumerate_regions(p);
  REQUIRE(sol.regions.size() == 2);
  for (int k = 0; k <= 100; ++k) {
    const Vec t = Vec::Constant(1, -1.0 + 0.02 * k);
    const int v = locate_region(sol, t);
    const double val = evaluate_value(sol.regions[v], p, t);
    CHECK(std::abs(val - lp_value(p, t)) <= 1e-9);
    if (t[0] < -1e-9) {
      CHECK(evaluate_primal(sol.regions[v], t)[0] == doctest::Approx(1.0));
      CHECK(val == doctest::Approx(t[0]));
      // The binding row is x <= 1 with multiplier -t.
      const CriticalRegion& r = sol.regions[v];
      REQUIRE(r.active_set == std::vector<int>{0});
      CHECK(evaluate_duals(r, t)[0] == doctest::Approx(-t[0]));
    } else if (t[0] > 1e-9) {
      CHECK(evaluate_primal(sol.regions[v], t)[0] == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("two floors at a sampled parameter") {
  const MpLp p = two_floors();
  const MpSolution sol = enumerate_regions(p);
  Vec t(2);
  t << 0.7, 0.6;
  const int v = locate_region(sol, t);
  CHECK(evaluate_value(sol.regions[v], p, t) == doctest::Approx(1.3));
  const Vec x = evaluate_primal(sol.regions[v], t);
  CHECK(x[0] == doctest::Approx(0.7));
  CHECK(x[1] == doctest::Approx(0.6));
  CHECK(lp_value(p, t) == doctest::Approx(1.3));
}

TEST_CASE("constant primal map when the parameter only moves the cost") {
  const MpLp p = sign_switch();
  const MpSolution sol = enumerate_regions(p);
  for (const CriticalRegion& r : sol.regions) CHECK(r.A_aff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("infeasible everywhere raises EmptySolution") {
  MpLp p = follow_theta();
  p.b[1] = -5;  // x <= -5 and x >= t >= 0
  CHECK_THROWS_AS(enumerate_regions(p), EmptySolution);
}

TEST_CASE("boundary points resolve to the lowest index") {
  const MpLp p = sign_switch();
  const MpSolution sol = enumerate_regions(p);
  const Vec zero = Vec::Zero(1);
  int hits = 0;
  for (size_t v = 0; v < sol.regions.size(); ++v) hits += sol.regions[v].contains(zero);
  CHECK(hits == 2);
  CHECK(locate_region(sol, zero) == 0);
  for (size_t v = 0; v < sol.regions.size(); ++v)
    CHECK(locate_region(sol, sol.regions[v].cheb_center) == static_cast<int>(v));
}

TEST_CASE("random mp-LPs: exactness, coverage, region KKT, continuity, subgradients") {
  Gen g(404);
  for (int rep = 0; rep < 12; ++rep) {
    const int n = g.integer(2, 3), d = g.integer(1, 3);
    const MpLp p = random_mplp(g, n, d, g.integer(2, 4), rep % 2 == 1);
    EnumerationOptions opt;
    opt.method = rep % 3 == 0 ? EnumerationMethod::Combinatorial : EnumerationMethod::Explore;
    const MpSolution sol = enumerate_regions(p, opt);
    REQUIRE(!sol.regions.empty());
    ThetaLayout all;
    for (int k = 0; k < d; ++k) all.master_idx.push_back(k);
    for (const CriticalRegion& r : sol.regions) {
      CHECK(r.cheb_radius > 1e-8);
      for (int i = 0; i < r.E.rows(); ++i) CHECK(std::abs(r.E.row(i).norm() - 1.0) < 1e-12);
      CHECK(region_kkt(r, p, r.cheb_center) <= 1e-7);
      const Vec gsub = subgradient_wrt_master(r, all, p, r.cheb_center);
      const double h = 1e-6;
      for (int k = 0; k < d; ++k) {
        Vec tp = r.cheb_center, tm = r.cheb_center;
        tp[k] += h;
        tm[k] -= h;
        const double fd = (evaluate_value(r, p, tp) - evaluate_value(r, p, tm)) / (2 * h);
        CHECK(std::abs(fd - gsub[k]) <= 1e-5);
      }
    }
    // Disjoint interiors: every center is located in its own region only.
    for (size_t v = 0; v < sol.regions.size(); ++v)
      for (size_t w = 0; w < sol.regions.size(); ++w)
        if (v != w) CHECK_FALSE(sol.regions[w].contains(sol.regions[v].cheb_center, -1e-9));
    const Vec lo = Vec::Constant(d, -1), hi = Vec::Constant(d, 1);
    for (int s = 0; s < 150; ++s) {
      const Vec t = sample_box(g, lo, hi);
      LpStatus st;
      const double obj = lp_value(p, t, &st);
      if (st != LpStatus::Optimal) continue;
      const auto v = try_locate_region(sol, t);
      REQUIRE(v.has_value());
      const CriticalRegion& r = sol.regions[*v];
      CHECK(std::abs(evaluate_value(r, p, t) - obj) <= 1e-6 * (1 + std::abs(obj)));
      const Vec x = evaluate_primal(r, t);
      CHECK((p.A * x - p.b - p.F * t).maxCoeff() <= 1e-6);
    }
    // Continuity across region boundaries found by bisection.
    for (int s = 0; s < 30; ++s) {
      Vec a = sample_box(g, lo, hi), b = sample_box(g, lo, hi);
      auto va = strict_locate(sol, a), vb = strict_locate(sol, b);
      if (!va || !vb || *va == *vb) continue;
      bool ok = true;
      for (int it = 0; it < 60 && ok; ++it) {
        const Vec mid = 0.5 * (a + b);
        auto vm = strict_locate(sol, mid);
        if (!vm) ok = false;
        else if (*vm == *va) a = mid;
        else {
          b = mid;
          vb = vm;
        }
      }
      if (!ok) continue;
      const Vec mid = 0.5 * (a + b);
      CHECK(std::abs(evaluate_value(sol.regions[*va], p, mid) -
                     evaluate_value(sol.regions[*vb], p, mid)) <= 1e-7);
    }
  }
}

TEST_CASE("exploration and combinatorial enumeration find the same regions") {
  Gen g(88);
  for (int rep = 0; rep < 30; ++rep) {
    const MpLp p = random_mplp(g, g.integer(2, 3), g.integer(1, 3), g.integer(2, 5), rep % 2 == 0);
    EnumerationOptions ex, co;
    ex.method = EnumerationMethod::Explore;
    ex.coverage_samples = 0;
    co.method = EnumerationMethod::Combinatorial;
    const MpSolution a = enumerate_regions(p, ex), b = enumerate_regions(p, co);
    std::set<std::vector<int>> sa, sb;
    for (auto& r : a.regions) sa.insert(r.active_set);
    for (auto& r : b.regions) sb.insert(r.active_set);
    CHECK(sa == sb);
  }
}

TEST_CASE("save and load round-trip bit-exactly") {
  Gen g(3);
  const MpLp p = random_mplp(g, 3, 2, 3, true);
  const MpSolution sol = enumerate_regions(p);
  std::stringstream ss;
  save_mp(sol, ss);
  const std::string first = ss.str();
  const MpSolution back = load_mp(ss);
  REQUIRE(back.regions.size() == sol.regions.size());
  CHECK(back.problem.H == sol.problem.H);
  CHECK(back.problem.A_theta == sol.problem.A_theta);
  for (size_t v = 0; v < sol.regions.size(); ++v) {
    const auto& r = sol.regions[v];
    const auto& q = back.regions[v];
    CHECK(r.E == q.E);
    CHECK(r.f == q.f);
    CHECK(r.A_aff == q.A_aff);
    CHECK(r.b_aff == q.b_aff);
    CHECK(r.G == q.G);
    CHECK(r.g == q.g);
    CHECK(r.active_set == q.active_set);
    CHECK(r.cheb_center == q.cheb_center);
    CHECK(r.cheb_radius == q.cheb_radius);
  }
  std::stringstream again;
  save_mp(back, again);
  CHECK(again.str() == first);
}

TEST_CASE("two-region fixture reloads with invariants") {
  const MpSolution sol = enumerate_regions(sign_switch());
  std::stringstream ss;
  save_mp(sol, ss);
  const MpSolution back = load_mp(ss);
  CHECK(back.regions.size() == 2);
  for (const auto& r : back.regions) CHECK(region_kkt(r, back.problem, r.cheb_center) <= 1e-7);
}

TEST_CASE("malformed documents raise FormatError with a path") {
  const MpSolution sol = enumerate_regions(follow_theta());
  std::stringstream ss;
  save_mp(sol, ss);
  std::string doc = ss.str();
  {
    std::string bad = doc;
    bad.replace(bad.find("\"format_version\": 1"), 19, "\"format_version\": 2");
    std::stringstream in(bad);
    CHECK_THROWS_AS(load_mp(in), FormatError);
  }
  {
    std::string bad = doc;
    bad.replace(bad.find("\"b_aff\""), 7, "\"b_aft\"");
    std::stringstream in(bad);
    try {
      load_mp(in);
      CHECK(false);
    } catch (const FormatError& e) {
      CHECK(e.path() == "$.regions[0].b_aff");
    }
  }
  {
    std::stringstream in("{not json");
    CHECK_THROWS_AS(load_mp(in), FormatError);
  }
}

TEST_CASE("embedding bookkeeping") {
  // One master copy variable and one random rhs: min x s.t. x >= z, x <= r.
  ScenarioSubproblemSpec s;
  s.id = "toy";
  s.c_x = Vec::Ones(1);
  s.lb = Vec::Constant(1, -kInf);
  s.ub = Vec::Constant(1, kInf);
  s.A = Mat(2, 1);
  s.A << -1, 1;
  s.C = Mat(2, 1);
  s.C << 1, 0;
  s.q = Vec::Zero(2);
  s.A_eq = Mat(0, 1);
  s.C_eq = Mat(0, 1);
  s.q_eq = Vec(0);
  s.z_lo = Vec::Zero(1);
  s.z_hi = Vec::Ones(1);
  s.master_cols = {0};
  s.rhs_slots.push_back(RhsSlot{1, false, 1.0, 2.0, 3.0, "r"});
  s.rhs_values = Vec::Constant(1, 2.5);
  s.cost_values = Vec(0);
  const Embedding e = embed_subproblem(s);
  CHECK(e.problem.theta_dim() == 2);
  CHECK(e.layout.master_idx == std::vector<int>{0});
  CHECK(e.layout.cost_idx.empty());
  CHECK(e.layout.rhs_idx == std::vector<int>{1});
  CHECK((e.problem.F.array() != 0).count() == 1);
  CHECK(e.problem.F(1, 1) == 1.0);

  // No random data: theta is the master copy only.
  s.rhs_slots.clear();
  s.rhs_values = Vec(0);
  s.q[1] = 2.5;
  const Embedding e2 = embed_subproblem(s);
  CHECK(e2.problem.theta_dim() == 1);
  CHECK(e2.layout.cost_idx.empty());
  CHECK(e2.layout.rhs_idx.empty());
  const MpSolution sol = enumerate_regions(e2.problem);
  const Vec t = Vec::Constant(1, 0.3);
  CHECK(evaluate_value(sol.regions[locate_region(sol, t)], e2.problem, t) == doctest::Approx(0.3));
}
