#include "mpbenders/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <map>
#include <set>

#include "mpbenders/errors.hpp"

namespace mpb {

namespace {

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  if (v == 0.0 && std::signbit(v)) return "-0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int num_alpha(const BendersPartition& part, CutMode m) {
  return m == CutMode::MultiCut ? static_cast<int>(part.subs.size()) : 1;
}

// Cut relaxed below the master value at x by more than the tolerance.
bool violated(const Cut& c, const Vec& x, double alpha) {
  const double v = c.eval(x);
  return v - alpha > 1e-9 * std::max(1.0, std::abs(v));
}

}  // namespace

const char* to_string(CutMode m) { return m == CutMode::MultiCut ? "multi" : "single"; }

const char* to_string(OracleMode m) {
  switch (m) {
    case OracleMode::Exact: return "exact";
    case OracleMode::MpSurrogate: return "mp";
    case OracleMode::MpWithExactFallback: return "mp-fallback";
  }
  return "?";
}

CutMode parse_cut_mode(const std::string& s) {
  if (s == "multi") return CutMode::MultiCut;
  if (s == "single") return CutMode::SingleCut;
  throw std::invalid_argument("unknown cut mode '" + s + "'");
}

OracleMode parse_oracle_mode(const std::string& s) {
  if (s == "exact") return OracleMode::Exact;
  if (s == "mp") return OracleMode::MpSurrogate;
  if (s == "mp-fallback") return OracleMode::MpWithExactFallback;
  throw std::invalid_argument("unknown oracle mode '" + s + "'");
}

double Cut::eval(const Vec& x) const {
  double v = intercept;
  for (size_t j = 0; j < cols.size(); ++j) v += coeffs[j] * (x[cols[j]] - anchor[j]);
  return v;
}

void BendersConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!std::isfinite(alpha_lower_bound)) throw std::invalid_argument("alpha_lower_bound must be finite");
}

double BendersState::rel_gap() const { return (UB - LB) / std::max(1.0, std::abs(UB)); }

MixedBinaryLp build_master_with_cuts(const BendersPartition& part, const std::vector<Cut>& cuts,
                                     const BendersConfig& cfg) {
  const StandardLp& b = part.master.base;
  const int n = b.num_vars(), na = num_alpha(part, cfg.cut_mode), N = n + na;
  MixedBinaryLp m;
  m.binary_idx = part.master.binary_idx;
  StandardLp& lp = m.base;
  lp.c = Vec(N);
  lp.lb = Vec(N);
  lp.ub = Vec(N);
  lp.c.head(n) = b.c;
  lp.lb.head(n) = b.lb;
  lp.ub.head(n) = b.ub;
  for (int a = 0; a < na; ++a) {
    lp.c[n + a] = cfg.cut_mode == CutMode::MultiCut ? part.subs[a].weight : 1.0;
    lp.lb[n + a] = cfg.alpha_lower_bound;
    lp.ub[n + a] = kInf;
  }

  const int mu = b.num_ub();
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < b.A_ub.outerSize(); ++j)
    for (SpMat::InnerIterator it(b.A_ub, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  lp.b_ub = Vec(mu + static_cast<int>(cuts.size()));
  lp.b_ub.head(mu) = b.b_ub;
  // coeffs^T x - alpha <= coeffs^T anchor - intercept
  for (size_t i = 0; i < cuts.size(); ++i) {
    const Cut& c = cuts[i];
    const int row = mu + static_cast<int>(i);
    for (size_t j = 0; j < c.cols.size(); ++j)
      if (c.coeffs[j] != 0.0) t.emplace_back(row, c.cols[j], c.coeffs[j]);
    const int a = cfg.cut_mode == CutMode::MultiCut ? c.sub : 0;
    if (a < 0 || a >= na) throw DimensionMismatch("cut scope does not match the cut mode");
    t.emplace_back(row, n + a, -1.0);
    lp.b_ub[row] = c.coeffs.dot(c.anchor) - c.intercept;
  }
  lp.A_ub = SpMat(lp.b_ub.size(), N);
  lp.A_ub.setFromTriplets(t.begin(), t.end());

  t.clear();
  for (int j = 0; j < b.A_eq.outerSize(); ++j)
    for (SpMat::InnerIterator it(b.A_eq, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  lp.A_eq = SpMat(b.num_eq(), N);
  lp.A_eq.setFromTriplets(t.begin(), t.end());
  lp.b_eq = b.b_eq;
  return m;
}

BendersState run(const BendersPartition& part, const BendersConfig& cfg, const SubproblemOracle& oracle) {
  cfg.validate();
  // Scenario probabilities sum to 1 within each period.
  std::map<int, double> wsum;
  for (const auto& s : part.subs) wsum[s.period] += s.weight;
  for (auto [t, w] : wsum)
    if (std::abs(w - 1.0) > 1e-9)
      throw std::invalid_argument("scenario probabilities of period " + std::to_string(t) + " sum to " + fmt(w));

  const int n = part.master.base.num_vars();
  const int ns = static_cast<int>(part.subs.size());
  std::vector<int> all_cols;
  {
    std::set<int> u;
    for (const auto& s : part.subs) u.insert(s.master_cols.begin(), s.master_cols.end());
    all_cols.assign(u.begin(), u.end());
  }

  BendersState st;
  // Root basis of the previous master, extended by the cuts added since.
  Basis warm;
  int warm_cuts = 0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    st.iteration = it;
    IterationRecord rec;
    rec.iter = it;

    auto t0 = std::chrono::steady_clock::now();
    MilpOptions mo = cfg.milp;
    if (!warm.empty()) {
      warm = extend_basis(warm, n + num_alpha(part, cfg.cut_mode), part.master.base.num_ub() + warm_cuts,
                          static_cast<int>(st.cuts.size()) - warm_cuts);
      mo.root_warm_start = &warm;
    }
    const MilpSolution ms = solve_milp(build_master_with_cuts(part, st.cuts, cfg), mo);
    warm = ms.root_basis;
    warm_cuts = static_cast<int>(st.cuts.size());
    rec.master_time = since(t0);
    if (ms.status == LpStatus::Infeasible) throw MasterInfeasible("master problem is infeasible");
    if (ms.status != LpStatus::Optimal) throw NumericalFailure("master problem is unbounded");
    rec.master_objective = ms.objective;
    st.LB = std::max(st.LB, ms.objective);
    const Vec x = ms.x.head(n);
    rec.x_master = x;

    t0 = std::chrono::steady_clock::now();
    const std::vector<OracleResult> res =
        cfg.parallel ? sweep_parallel(oracle, part.subs, x) : sweep_serial(oracle, part.subs, x);
    rec.sub_time = since(t0);
    st.evaluations += ns;
    for (const auto& r : res) st.eval_seconds += r.seconds;

    double ub = part.master.base.c.dot(x);
    for (int s = 0; s < ns; ++s) ub += part.subs[s].weight * res[s].value;
    if (ub < st.UB) {
      st.UB = ub;
      st.incumbent = x;
      st.sub_values.resize(ns);
      for (int s = 0; s < ns; ++s) st.sub_values[s] = res[s].value;
    }
    rec.regions.resize(ns);
    for (int s = 0; s < ns; ++s) rec.regions[s] = res[s].region;

    const bool done = st.rel_gap() <= cfg.tol;
    if (!done) {
      std::vector<Cut> fresh;
      if (cfg.cut_mode == CutMode::MultiCut) {
        for (int s = 0; s < ns; ++s) {
          Cut c{s, res[s].value, part.subs[s].master_cols, res[s].subgradient, copy_values(part.subs[s], x), it};
          if (violated(c, x, ms.x[n + s])) fresh.push_back(std::move(c));
        }
      } else {
        Cut c{-1, 0.0, all_cols, Vec::Zero(all_cols.size()), Vec(all_cols.size()), it};
        for (size_t j = 0; j < all_cols.size(); ++j) c.anchor[j] = x[all_cols[j]];
        for (int s = 0; s < ns; ++s) {
          const double w = part.subs[s].weight;
          c.intercept += w * res[s].value;
          for (int k = 0; k < part.subs[s].n_z(); ++k) {
            const int j = static_cast<int>(
                std::lower_bound(all_cols.begin(), all_cols.end(), part.subs[s].master_cols[k]) - all_cols.begin());
            c.coeffs[j] += w * res[s].subgradient[k];
          }
        }
        if (violated(c, x, ms.x[n])) fresh.push_back(std::move(c));
      }
      rec.cuts_added = static_cast<int>(fresh.size());
      for (auto& c : fresh) st.cuts.push_back(std::move(c));
    }
    rec.LB = st.LB;
    rec.UB = st.UB;
    rec.rel_gap = st.rel_gap();
    st.log.push_back(std::move(rec));
    if (done) {
      st.converged = true;
      break;
    }
    // No cut separates the iterate: the bounds cannot move any further.
    if (st.log.back().cuts_added == 0) break;
  }
  return st;
}

BendersState run(const ModelGraph& g, const BendersConfig& cfg, const SubproblemOracle& oracle) {
  return run(extract_benders_partition(g), cfg, oracle);
}

std::vector<TrajectoryRow> record_trajectory(const BendersState& state,
                                             const std::vector<ScenarioSubproblemSpec>& subs) {
  std::vector<TrajectoryRow> rows;
  for (const auto& rec : state.log)
    for (size_t s = 0; s < rec.regions.size(); ++s)
      rows.push_back({rec.iter, subs[s].scenario, subs[s].period, rec.regions[s]});
  return rows;
}

void write_iterations_csv(std::ostream& os, const BendersState& state) {
  os << "iter,LB,UB,rel_gap,cuts_added\n";
  for (const auto& r : state.log)
    os << r.iter << ',' << fmt(r.LB) << ',' << fmt(r.UB) << ',' << fmt(r.rel_gap) << ',' << r.cuts_added << '\n';
}

void write_timings_csv(std::ostream& os, const BendersState& state) {
  os << "iter,master_time_s,sub_time_s\n";
  for (const auto& r : state.log) os << r.iter << ',' << fmt(r.master_time) << ',' << fmt(r.sub_time) << '\n';
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
  os << "iter,scenario,period,region_id\n";
  for (const auto& r : rows) {
    os << r.iter << ',' << r.scenario << ',' << r.period << ',';
    if (r.region) os << *r.region;
    os << '\n';
  }
}

}  // namespace mpb
