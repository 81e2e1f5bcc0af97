#include "mpbenders/cep.hpp"

#include <algorithm>
#include <cmath>

#include "mpbenders/errors.hpp"
#include "mpbenders/rng.hpp"

namespace mpb::cep {

namespace {

constexpr int kTable = 4;

// Fills columns t >= 4 of a 4-column table by repeating the 3->4 growth.
Mat extend(const Mat& base, int T) {
  Mat m(base.rows(), T);
  for (int i = 0; i < base.rows(); ++i) {
    const double r = base(i, 2) != 0.0 ? base(i, 3) / base(i, 2) : 0.0;
    for (int t = 0; t < T; ++t)
      m(i, t) = t < kTable ? base(i, t) : base(i, 3) * std::pow(r, t - (kTable - 1));
  }
  return m;
}

Mat table(std::initializer_list<std::initializer_list<double>> rows) {
  Mat m(rows.size(), kTable);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool all_zero(const Mat& m, int row) { return (m.row(row).array() == 0.0).all(); }

std::string tag(const char* base, int j) { return std::string(base) + std::to_string(j + 1); }

// Scenario-period operating node: p (production), b (sales), s (purchases).
// Variables are declared p1..3, b1..3, s1..3.
ModelNode scenario_node(const CepData& d, const ScenarioSet& s, int k, int t) {
  ModelNode n;
  n.name = "op_k" + std::to_string(k + 1) + "_t" + std::to_string(t + 1);
  const int P = kProcesses, J = kChemicals;
  for (int p = 0; p < P; ++p) n.add_var({tag("p", p)});
  for (int j = 0; j < J; ++j) n.add_var({tag("b", j), 0.0, all_zero(d.demand, j) ? 0.0 : kInf});
  for (int j = 0; j < J; ++j) n.add_var({tag("s", j), 0.0, all_zero(d.avail, j) ? 0.0 : kInf});
  auto pv = [](int p) { return p; };
  auto bv = [&](int j) { return P + j; };
  auto sv = [&](int j) { return P + J + j; };

  // Material balance: production - consumption - sales + purchases = 0.
  for (int j = 0; j < J; ++j) {
    LocalRow r{tag("balance", j), {}, Sense::Eq, 0.0};
    for (int p = 0; p < P; ++p) {
      const double a = d.mu(j, p) - d.eta(j, p);
      if (a != 0.0) r.terms.push_back({pv(p), a});
    }
    r.terms.push_back({bv(j), -1.0});
    r.terms.push_back({sv(j), 1.0});
    n.add_row(r);
  }

  auto value = [&](Slot sl) { return s.at(k, t, sl); };
  // Availability then demand rows; their right-hand sides are parameters.
  const Slot avail_slot[] = {Slot::Avail1, Slot::Avail2};
  for (int j = 0; j < J; ++j) {
    if (all_zero(d.avail, j)) continue;
    if (j > 1) throw ShapeError("unexpected availability on chemical " + std::to_string(j + 1));
    const int row = n.add_row({tag("avail", j), {{sv(j), 1.0}}, Sense::Le, 0.0});
    auto [lo, hi] = slot_range(d.avail.row(j));
    n.add_param({tag("A", j), ParamKind::Rhs, row, 1.0, value(avail_slot[j]), lo, hi});
  }
  for (int j = 0; j < J; ++j) {
    if (all_zero(d.demand, j)) continue;
    if (j != 2) throw ShapeError("unexpected demand on chemical " + std::to_string(j + 1));
    const int row = n.add_row({tag("demand", j), {{bv(j), 1.0}}, Sense::Le, 0.0});
    auto [lo, hi] = slot_range(d.demand.row(j));
    n.add_param({tag("D", j), ParamKind::Rhs, row, 1.0, value(Slot::Demand3), lo, hi});
  }

  // Cost parameters in the order gamma, sigma, phi.
  {
    auto [lo, hi] = slot_range(d.gamma.row(2));
    n.add_param({"gamma3", ParamKind::Cost, bv(2), -1.0, value(Slot::Gamma3), lo, hi});
  }
  for (int p = 0; p < P; ++p) {
    auto [lo, hi] = slot_range(d.sigma.row(p));
    n.add_param({tag("sigma", p), ParamKind::Cost, pv(p), 1.0, d.sigma(p, t), lo, hi});
  }
  const Slot phi_slot[] = {Slot::Phi1, Slot::Phi2};
  for (int j = 0; j < 2; ++j) {
    auto [lo, hi] = slot_range(d.phi.row(j));
    n.add_param({tag("phi", j), ParamKind::Cost, sv(j), 1.0, value(phi_slot[j]), lo, hi});
  }
  return n;
}

// Per-period expansion node: x_p, y_p, q_p for each process.
ModelNode master_node(const CepData& d, int t) {
  ModelNode n;
  n.name = "expand_t" + std::to_string(t + 1);
  for (int p = 0; p < kProcesses; ++p) {
    const int x = n.add_var({tag("x", p), 0.0, kInf, d.alpha(p, t)});
    const int y = n.add_var({tag("y", p), 0.0, 1.0, d.beta(p, t), true});
    const int q = n.add_var({tag("q", p), 0.0, d.QU[p]});
    n.add_row({tag("xmin", p), {{y, d.EL[p]}, {x, -1.0}}, Sense::Le, 0.0});
    n.add_row({tag("xmax", p), {{x, 1.0}, {y, -d.EU[p]}}, Sense::Le, 0.0});
    if (t == 0) n.add_row({tag("cum", p), {{q, 1.0}, {x, -1.0}}, Sense::Eq, 0.0});
  }
  return n;
}

int x_var(int p) { return 3 * p; }
int q_var(int p) { return 3 * p + 2; }

void link_operation(ModelGraph& g, int op, int master, int t) {
  for (int p = 0; p < kProcesses; ++p)
    g.add_edge({tag("cap", p) + "_t" + std::to_string(t + 1), {{op, p, 1.0}, {master, q_var(p), -1.0}},
                Sense::Le, 0.0});
}

void check(const CepData& d, const ScenarioSet& s) {
  if (s.T != d.T) throw DimensionMismatch("scenario horizon does not match data");
  if (static_cast<int>(s.pi.size()) != s.K ||
      static_cast<int>(s.values.size()) != s.K * s.T * kUncertain)
    throw DimensionMismatch("scenario set shape");
}

}  // namespace

CepData default_data(int T) {
  if (T < 1) throw DimensionMismatch("horizon must be positive");
  CepData d;
  d.T = T;
  d.alpha = extend(table({{1.38, 1.67, 2.22, 3.58}, {2.72, 3.291, 4.381, 7.055}, {1.76, 2.13, 2.834, 4.565}}), T);
  d.beta = extend(table({{85, 102.85, 136.89, 220.46}, {73, 88.33, 117.56, 189.34}, {110, 133.10, 177.15, 285.31}}), T);
  d.sigma = extend(table({{0.40, 0.48, 0.64, 1.03}, {0.60, 0.72, 0.96, 1.55}, {0.50, 0.60, 0.80, 1.29}}), T);
  d.avail = extend(table({{6, 7.26, 9.66, 15.56}, {20, 24.20, 32.21, 51.87}, {0, 0, 0, 0}}), T);
  d.demand = extend(table({{0, 0, 0, 0}, {0, 0, 0, 0}, {30, 36.30, 48.31, 77.81}}), T);
  d.gamma = extend(table({{0, 0, 0, 0}, {0, 0, 0, 0}, {26.20, 31.70, 42.19, 67.95}}), T);
  d.phi = extend(table({{4, 4.84, 6.44, 10.37}, {9.6, 11.61, 15.46, 24.90}, {0, 0, 0, 0}}), T);
  d.EL = Vec{{1.0, 10.0, 10.0}};
  d.EU = Vec{{6.0, 30.0, 30.0}};
  d.QU = Vec::Constant(kProcesses, 100.0);
  d.eta = Mat{{1.11, 0.0, 0.0}, {0.0, 1.22, 1.05}, {0.0, 0.0, 0.0}};
  d.mu = Mat{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 1.0}};
  return d;
}

const char* slot_name(Slot s) {
  switch (s) {
    case Slot::Avail1: return "A1";
    case Slot::Avail2: return "A2";
    case Slot::Demand3: return "D3";
    case Slot::Gamma3: return "gamma3";
    case Slot::Phi1: return "phi1";
    case Slot::Phi2: return "phi2";
  }
  return "?";
}

double slot_mean(const CepData& d, Slot s, int t) {
  switch (s) {
    case Slot::Avail1: return d.avail(0, t);
    case Slot::Avail2: return d.avail(1, t);
    case Slot::Demand3: return d.demand(2, t);
    case Slot::Gamma3: return d.gamma(2, t);
    case Slot::Phi1: return d.phi(0, t);
    case Slot::Phi2: return d.phi(1, t);
  }
  return 0.0;
}

ScenarioSet sample_scenarios(const CepData& d, int K, std::uint64_t seed) {
  if (K < 1) throw DimensionMismatch("scenario count must be positive");
  ScenarioSet s;
  s.K = K;
  s.T = d.T;
  s.pi.assign(K, 1.0 / K);
  s.values.resize(static_cast<size_t>(K) * d.T * kUncertain);
  Rng rng(seed);
  size_t i = 0;
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < d.T; ++t)
      for (int sl = 0; sl < kUncertain; ++sl) {
        const double m = slot_mean(d, static_cast<Slot>(sl), t);
        double v = m + 0.1 * m * rng.normal();
        for (int tries = 1; v < 0.0 && tries < 100; ++tries) v = m + 0.1 * m * rng.normal();
        s.values[i++] = std::max(v, 0.0);
      }
  return s;
}

std::pair<double, double> slot_range(const Mat& means_row_by_t) {
  const double lo = std::max(0.0, 0.5 * means_row_by_t.minCoeff());
  const double hi = 1.5 * means_row_by_t.maxCoeff();
  return {lo, hi};
}

ModelGraph build_graph(const CepData& d, const ScenarioSet& s) {
  check(d, s);
  ModelGraph g;
  Subgraph master{"master", {}, 1.0, -1, -1};
  for (int t = 0; t < d.T; ++t) master.nodes.push_back(g.add_node(master_node(d, t)));
  for (int t = 1; t < d.T; ++t)
    for (int p = 0; p < kProcesses; ++p)
      g.add_edge({tag("cum", p) + "_t" + std::to_string(t + 1),
                  {{master.nodes[t], q_var(p), 1.0},
                   {master.nodes[t - 1], q_var(p), -1.0},
                   {master.nodes[t], x_var(p), -1.0}},
                  Sense::Eq, 0.0});
  g.add_subgraph(master);
  g.set_master("master");
  for (int k = 0; k < s.K; ++k)
    for (int t = 0; t < d.T; ++t) {
      const int op = g.add_node(scenario_node(d, s, k, t));
      link_operation(g, op, master.nodes[t], t);
      g.add_subgraph({"scenario_k" + std::to_string(k + 1) + "_t" + std::to_string(t + 1), {op}, s.pi[k], k, t});
    }
  return g;
}

ScenarioSubproblemSpec build_subproblem_spec(const CepData& d, const ScenarioSet& s, int k, int t) {
  check(d, s);
  if (k < 0 || k >= s.K || t < 0 || t >= d.T) throw DimensionMismatch("scenario or period out of range");
  ModelGraph g;
  const int m = g.add_node(master_node(d, t));
  const int op = g.add_node(scenario_node(d, s, k, t));
  link_operation(g, op, m, t);
  g.add_subgraph({"master", {m}, 1.0, -1, -1});
  g.set_master("master");
  g.add_subgraph({"scenario_k" + std::to_string(k + 1) + "_t" + std::to_string(t + 1), {op}, s.pi[k], k, t});
  return extract_benders_partition(g).subs.at(0);
}

Embedding build_mp_embedding(const CepData& d) {
  ScenarioSet mean;
  mean.K = 1;
  mean.T = d.T;
  mean.pi = {1.0};
  for (int t = 0; t < d.T; ++t)
    for (int sl = 0; sl < kUncertain; ++sl) mean.values.push_back(slot_mean(d, static_cast<Slot>(sl), t));
  return embed_subproblem(build_subproblem_spec(d, mean, 0, 0));
}

}  // namespace mpb::cep
