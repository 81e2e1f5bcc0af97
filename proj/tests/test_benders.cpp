#include <limits>
#include <sstream>

#include "doctest.h"
#include "mpbenders/benders.hpp"
#include "mpbenders/cep.hpp"
#include "mpbenders/errors.hpp"
#include "support.hpp"

using namespace mpb;
using testing_support::Gen;

namespace {

// Master x in [0, 10] at cost 1; recourse min -2y s.t. y <= x, so the
// recourse value is -2x everywhere and the optimum is x = 10, value -10.
ModelGraph affine_graph() {
  ModelGraph g;
  ModelNode m;
  m.name = "m";
  m.add_var({"x", 0.0, 10.0, 1.0});
  ModelNode s;
  s.name = "s";
  s.add_var({"y", 0.0, kInf, -2.0});
  const int a = g.add_node(m), b = g.add_node(s);
  g.add_edge({"cap", {{b, 0, 1.0}, {a, 0, -1.0}}, Sense::Le, 0.0});
  g.add_subgraph({"master", {a}, 1.0});
  g.set_master("master");
  g.add_subgraph({"sub", {b}, 1.0, 0, 0});
  return g;
}

struct CepCase {
  cep::CepData data;
  ModelGraph graph;
  BendersPartition part;
  Embedding emb;
  std::shared_ptr<const MpSolution> mp;

  CepCase(int T, int K, std::uint64_t seed)
      : data(cep::default_data(T)),
        graph(cep::build_graph(data, cep::sample_scenarios(data, K, seed))),
        part(extract_benders_partition(graph)),
        emb(cep::build_mp_embedding(data)),
        mp(std::make_shared<const MpSolution>(enumerate_regions(emb.problem))) {}
};

double monolithic(const ModelGraph& g) {
  const MilpSolution s = solve_milp(assemble_monolithic(g).problem);
  REQUIRE(s.status == LpStatus::Optimal);
  return s.objective;
}

void check_bounds(const BendersState& st, double tol) {
  REQUIRE(!st.log.empty());
  for (size_t i = 0; i < st.log.size(); ++i) {
    const auto& r = st.log[i];
    CHECK(r.LB <= r.UB + 1e-9 * std::max(1.0, std::abs(r.UB)));
    if (i > 0) {
      CHECK(r.LB >= st.log[i - 1].LB);
      CHECK(r.UB <= st.log[i - 1].UB);
    }
  }
  CHECK(st.log.back().rel_gap <= tol);
}

// Smallest slack of theta in its region, or -1 when outside every region.
double interior_margin(const MpSolution& sol, const Vec& th) {
  const auto r = try_locate_region(sol, th);
  if (!r) return -1.0;
  const auto& cr = sol.regions[*r];
  return (cr.f - cr.E * th).minCoeff();
}

}  // namespace

TEST_CASE("affine recourse converges in two iterations") {
  const ModelGraph g = affine_graph();
  const BendersPartition part = extract_benders_partition(g);
  const ExactOracle oracle(part.subs);
  BendersConfig cfg;
  for (CutMode mode : {CutMode::MultiCut, CutMode::SingleCut}) {
    cfg.cut_mode = mode;
    const BendersState st = run(part, cfg, oracle);
    CHECK(st.converged);
    CHECK(st.iteration <= 2);
    CHECK(st.UB == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(st.incumbent[0] == doctest::Approx(10.0));
    // Cut monotonicity.
    for (size_t i = 1; i < st.log.size(); ++i)
      CHECK(st.log[i].master_objective >= st.log[i - 1].master_objective);
  }
}

TEST_CASE("infinite tolerance stops after the first iteration") {
  const BendersPartition part = extract_benders_partition(affine_graph());
  BendersConfig cfg;
  cfg.tol = std::numeric_limits<double>::infinity();
  const BendersState st = run(part, cfg, ExactOracle(part.subs));
  CHECK(st.iteration == 1);
  CHECK(st.converged);
  CHECK(st.LB <= st.UB);
  CHECK(st.LB == doctest::Approx(cfg.alpha_lower_bound).epsilon(1e-6));
}

TEST_CASE("config and probability validation") {
  const BendersPartition part = extract_benders_partition(affine_graph());
  const ExactOracle oracle(part.subs);
  BendersConfig cfg;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(run(part, cfg, oracle), std::invalid_argument);
  cfg = {};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(run(part, cfg, oracle), std::invalid_argument);
  BendersPartition bad = part;
  bad.subs[0].weight = 0.5;
  CHECK_THROWS_AS(run(bad, BendersConfig{}, oracle), std::invalid_argument);
  CHECK(parse_cut_mode("single") == CutMode::SingleCut);
  CHECK(parse_oracle_mode("mp-fallback") == OracleMode::MpWithExactFallback);
  CHECK_THROWS(parse_oracle_mode("fast"));
}

TEST_CASE("infeasible master is reported") {
  ModelGraph g = affine_graph();
  BendersPartition part = extract_benders_partition(g);
  part.master.base.lb[0] = 11.0;
  part.master.base.ub[0] = 12.0;
  part.master.base.A_ub = testing_support::sparse(Mat::Ones(1, 1));
  part.master.base.b_ub = Vec::Constant(1, 5.0);
  CHECK_THROWS_AS(run(part, BendersConfig{}, ExactOracle(part.subs)), MasterInfeasible);
}

TEST_CASE("infeasible recourse raises an oracle failure") {
  ModelGraph g;
  ModelNode m;
  m.name = "m";
  m.add_var({"x", 0.0, 10.0, 1.0});
  ModelNode s;
  s.name = "s";
  s.add_var({"y", 0.0, 1.0, 1.0});
  const int a = g.add_node(m), b = g.add_node(s);
  g.add_edge({"need", {{b, 0, 1.0}, {a, 0, -1.0}}, Sense::Ge, 5.0});
  g.add_subgraph({"master", {a}, 1.0});
  g.set_master("master");
  g.add_subgraph({"sub", {b}, 1.0, 0, 0});
  const BendersPartition part = extract_benders_partition(g);
  CHECK_THROWS_AS(run(part, BendersConfig{}, ExactOracle(part.subs)), OracleFailure);
}

TEST_CASE("master columns for each cut mode") {
  const cep::CepData d = cep::default_data(2);
  const BendersPartition part = extract_benders_partition(cep::build_graph(d, cep::sample_scenarios(d, 2, 1)));
  REQUIRE(part.subs.size() == 4);
  const int n = part.master.base.num_vars();
  BendersConfig cfg;
  MixedBinaryLp m = build_master_with_cuts(part, {}, cfg);
  REQUIRE(m.base.num_vars() == n + 4);
  const MilpSolution sol = solve_milp(m);
  REQUIRE(sol.status == LpStatus::Optimal);
  for (int a = 0; a < 4; ++a) CHECK(sol.x[n + a] == cfg.alpha_lower_bound);

  // One iteration's cuts, aggregated.
  const ExactOracle oracle(part.subs);
  const Vec x = sol.x.head(n);
  const auto res = sweep_serial(oracle, part.subs, x);
  cfg.cut_mode = CutMode::SingleCut;
  cfg.max_iter = 1;
  const BendersState st = run(part, cfg, oracle);
  REQUIRE(st.cuts.size() == 1);
  const Cut& c = st.cuts[0];
  double icpt = 0.0;
  Vec sum = Vec::Zero(n);
  for (size_t s = 0; s < part.subs.size(); ++s) {
    icpt += part.subs[s].weight * res[s].value;
    for (int k = 0; k < part.subs[s].n_z(); ++k) sum[part.subs[s].master_cols[k]] += part.subs[s].weight * res[s].subgradient[k];
  }
  CHECK(c.intercept == doctest::Approx(icpt).epsilon(1e-12));
  for (size_t j = 0; j < c.cols.size(); ++j) CHECK(c.coeffs[j] == doctest::Approx(sum[c.cols[j]]).epsilon(1e-12));
  const MixedBinaryLp m1 = build_master_with_cuts(part, st.cuts, cfg);
  CHECK(m1.base.num_ub() == part.master.base.num_ub() + 1);
  CHECK(m1.base.num_vars() == n + 1);
}

TEST_CASE("exact and mp oracles agree away from region boundaries") {
  const CepCase cc(4, 5, 11);
  const ExactOracle exact(cc.part.subs);
  const MpOracle mp(cc.mp, cc.emb.layout, cc.part.subs);
  Gen g(3);
  int checked = 0, tries = 0;
  while (checked < 100 && tries < 10000) {
    ++tries;
    const int s = g.integer(0, static_cast<int>(cc.part.subs.size()) - 1);
    Vec z(3);
    for (int k = 0; k < 3; ++k) z[k] = g.uniform(0, 100);
    if (interior_margin(*cc.mp, cc.part.subs[s].theta(z)) < 1e-6) continue;
    const OracleResult a = exact.evaluate(s, z), b = mp.evaluate(s, z);
    CHECK(std::abs(a.value - b.value) <= 1e-6);
    CHECK((a.subgradient - b.subgradient).lpNorm<Eigen::Infinity>() <= 1e-6);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("cuts are tight at their anchor and valid elsewhere") {
  const CepCase cc(4, 3, 5);
  const ExactOracle exact(cc.part.subs);
  const MpOracle mp(cc.mp, cc.emb.layout, cc.part.subs);
  Gen g(8);
  for (const SubproblemOracle* o : {static_cast<const SubproblemOracle*>(&exact), static_cast<const SubproblemOracle*>(&mp)}) {
    for (int rep = 0; rep < 20; ++rep) {
      const int s = g.integer(0, static_cast<int>(cc.part.subs.size()) - 1);
      const auto& sp = cc.part.subs[s];
      Vec z(3);
      for (int k = 0; k < 3; ++k) z[k] = g.coin(0.2) ? 0.0 : g.uniform(0, 100);
      const OracleResult r = o->evaluate(s, z);
      Cut c{s, r.value, sp.master_cols, r.subgradient, z, 1};
      Vec xm = Vec::Zero(cc.part.master.base.num_vars());
      for (int k = 0; k < 3; ++k) xm[sp.master_cols[k]] = z[k];
      CHECK(c.eval(xm) == r.value);
      for (int v = 0; v < 50; ++v) {
        Vec z2(3);
        for (int k = 0; k < 3; ++k) z2[k] = g.uniform(0, 100);
        for (int k = 0; k < 3; ++k) xm[sp.master_cols[k]] = z2[k];
        CHECK(c.eval(xm) <= exact.evaluate(s, z2).value + 1e-6);
      }
    }
  }
}

TEST_CASE("parallel sweep reproduces the serial sweep") {
  const CepCase cc(4, 20, 2);
  const ExactOracle exact(cc.part.subs);
  const MpOracle mp(cc.mp, cc.emb.layout, cc.part.subs, &exact);
  Gen g(4);
  Vec x = Vec::Zero(cc.part.master.base.num_vars());
  for (int j = 0; j < x.size(); ++j) x[j] = g.uniform(0, 100);
  for (const SubproblemOracle* o : {static_cast<const SubproblemOracle*>(&exact), static_cast<const SubproblemOracle*>(&mp)}) {
    const auto a = sweep_serial(*o, cc.part.subs, x), b = sweep_parallel(*o, cc.part.subs, x);
    REQUIRE(a.size() == b.size());
    for (size_t s = 0; s < a.size(); ++s) {
      CHECK(a[s].value == b[s].value);
      CHECK(a[s].subgradient == b[s].subgradient);
      CHECK(a[s].region == b[s].region);
    }
  }
}

TEST_CASE("parameters outside every region") {
  const CepCase cc(1, 1, 1);
  BendersPartition part = cc.part;
  part.subs[0].rhs_values[2] = 1e6;  // demand far above its range
  const ExactOracle exact(part.subs);
  const MpOracle strict(cc.mp, cc.emb.layout, part.subs);
  const MpOracle lenient(cc.mp, cc.emb.layout, part.subs, &exact);
  const Vec z{{5.0, 20.0, 20.0}};
  CHECK_THROWS_AS(strict.evaluate(0, z), NoRegionFound);
  const OracleResult r = lenient.evaluate(0, z);
  CHECK(!r.region);
  CHECK(r.value == exact.evaluate(0, z).value);
}

TEST_CASE("small expansion plans match the monolithic solve") {
  const CepCase cc(3, 4, 6);
  const double ref = monolithic(cc.graph);
  const ExactOracle exact(cc.part.subs);
  const MpOracle mp(cc.mp, cc.emb.layout, cc.part.subs);
  for (CutMode cm : {CutMode::MultiCut, CutMode::SingleCut})
    for (const SubproblemOracle* o : {static_cast<const SubproblemOracle*>(&exact), static_cast<const SubproblemOracle*>(&mp)}) {
      BendersConfig cfg;
      cfg.cut_mode = cm;
      const BendersState st = run(cc.part, cfg, *o);
      CHECK(st.converged);
      check_bounds(st, cfg.tol);
      CHECK(std::abs(st.UB - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
      // Weak duality at every iteration.
      for (const auto& r : st.log) {
        CHECK(r.LB <= ref + 1e-6 * std::abs(ref));
        CHECK(r.UB >= ref - 1e-6 * std::abs(ref));
      }
      MESSAGE(std::string(to_string(cm)) << " iterations: " << st.iteration);
    }
}

TEST_CASE("reference expansion instance") {
  const CepCase cc(4, 10, 1);
  const double ref = monolithic(cc.graph);
  const BendersState st = run(cc.part, BendersConfig{}, ExactOracle(cc.part.subs));
  CHECK(st.converged);
  CHECK(std::abs(st.UB - ref) <= 1e-6 * std::abs(ref));
  // Incumbent reproduces the upper bound.
  double ub = cc.part.master.base.c.dot(st.incumbent);
  for (size_t s = 0; s < cc.part.subs.size(); ++s) ub += cc.part.subs[s].weight * st.sub_values[s];
  CHECK(ub == doctest::Approx(st.UB).epsilon(1e-12));
}

TEST_CASE("trajectory rows") {
  const CepCase cc(2, 3, 9);
  const MpOracle mp(cc.mp, cc.emb.layout, cc.part.subs);
  const BendersState st = run(cc.part, BendersConfig{}, mp);
  const auto rows = record_trajectory(st, cc.part.subs);
  CHECK(rows.size() == st.log.size() * 6);
  int first = 0;
  for (const auto& r : rows) {
    REQUIRE(r.region);
    CHECK(*r.region >= 0);
    CHECK(*r.region < static_cast<int>(cc.mp->regions.size()));
    first += r.iter == 1;
  }
  CHECK(first == 6);
  // Replaying a logged iterate lands in the logged region.
  for (const auto& rec : st.log)
    for (size_t s = 0; s < cc.part.subs.size(); ++s)
      CHECK(locate_region(*cc.mp, cc.part.subs[s].theta(copy_values(cc.part.subs[s], rec.x_master))) == *rec.regions[s]);

  std::ostringstream a, b;
  write_iterations_csv(a, st);
  write_iterations_csv(b, run(cc.part, BendersConfig{}, mp));
  CHECK(a.str() == b.str());
  std::ostringstream tr;
  write_trajectory_csv(tr, rows);
  CHECK(tr.str().rfind("iter,scenario,period,region_id\n1,0,0,", 0) == 0);
}
