#include "mpbenders/graph.hpp"

#include <map>
#include <set>
#include <string>

#include "mpbenders/errors.hpp"

namespace mpb {

namespace {

// Accumulates rows in <= / = form.
struct RowSet {
  std::vector<Eigen::Triplet<double>> ub, eq;
  std::vector<double> b_ub, b_eq;

  void add(const std::vector<std::pair<int, double>>& terms, Sense s, double rhs, bool split_eq) {
    if (s == Sense::Eq && !split_eq) {
      const int r = static_cast<int>(b_eq.size());
      for (auto [c, v] : terms) eq.emplace_back(r, c, v);
      b_eq.push_back(rhs);
      return;
    }
    auto put = [&](double sign) {
      const int r = static_cast<int>(b_ub.size());
      for (auto [c, v] : terms) ub.emplace_back(r, c, sign * v);
      b_ub.push_back(sign * rhs);
    };
    if (s == Sense::Le) put(1.0);
    else if (s == Sense::Ge) put(-1.0);
    else {
      put(1.0);
      put(-1.0);
    }
  }

  void finish(StandardLp& lp, int n) const {
    lp.A_ub = SpMat(static_cast<int>(b_ub.size()), n);
    lp.A_ub.setFromTriplets(ub.begin(), ub.end());
    lp.A_ub.makeCompressed();
    lp.b_ub = Eigen::Map<const Vec>(b_ub.data(), static_cast<int>(b_ub.size()));
    lp.A_eq = SpMat(static_cast<int>(b_eq.size()), n);
    lp.A_eq.setFromTriplets(eq.begin(), eq.end());
    lp.A_eq.makeCompressed();
    lp.b_eq = Eigen::Map<const Vec>(b_eq.data(), static_cast<int>(b_eq.size()));
  }
};

std::string node_label(const ModelGraph& g, int n) { return "node '" + g.nodes()[n].name + "'"; }

}  // namespace

int ModelNode::add_var(Variable v) {
  vars.push_back(std::move(v));
  return static_cast<int>(vars.size()) - 1;
}

int ModelNode::add_row(LocalRow r) {
  rows.push_back(std::move(r));
  return static_cast<int>(rows.size()) - 1;
}

int ModelNode::add_param(ParamDecl p) {
  params.push_back(std::move(p));
  return static_cast<int>(params.size()) - 1;
}

double ModelNode::total_cost(int var) const {
  double c = vars[var].cost;
  for (const ParamDecl& p : params)
    if (p.kind == ParamKind::Cost && p.target == var) c += p.scale * p.value;
  return c;
}

double ModelNode::total_rhs(int row) const {
  double r = rows[row].rhs;
  for (const ParamDecl& p : params)
    if (p.kind == ParamKind::Rhs && p.target == row) r += p.scale * p.value;
  return r;
}

void ModelNode::validate() const {
  const int n = static_cast<int>(vars.size());
  for (const Variable& v : vars) {
    if (v.lb > v.ub) throw DimensionMismatch("node " + name + ": variable " + v.name + " has lb > ub");
    if (v.binary && (v.lb != 0.0 || v.ub != 1.0))
      throw DimensionMismatch("node " + name + ": binary " + v.name + " must have bounds [0,1]");
  }
  for (const LocalRow& r : rows)
    for (const Term& t : r.terms)
      if (t.var < 0 || t.var >= n) throw DimensionMismatch("node " + name + ": row " + r.name + " references a missing variable");
  for (const ParamDecl& p : params) {
    const int lim = p.kind == ParamKind::Cost ? n : static_cast<int>(rows.size());
    if (p.target < 0 || p.target >= lim)
      throw DimensionMismatch("node " + name + ": parameter " + p.name + " targets nothing");
  }
}

int ModelGraph::add_node(ModelNode n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int ModelGraph::add_edge(LinkConstraint e) {
  std::set<int> touched;
  for (const LinkTerm& t : e.terms) touched.insert(t.node);
  if (touched.size() < 2)
    throw ShapeError("link '" + e.name + "' references fewer than two nodes; declare it as a local row");
  edges_.push_back(std::move(e));
  return static_cast<int>(edges_.size()) - 1;
}

int ModelGraph::add_subgraph(Subgraph s) {
  subgraphs_.push_back(std::move(s));
  return static_cast<int>(subgraphs_.size()) - 1;
}

void ModelGraph::set_master(const std::string& name) {
  for (size_t s = 0; s < subgraphs_.size(); ++s) {
    if (subgraphs_[s].name == name) {
      master_ = static_cast<int>(s);
      return;
    }
  }
  throw ShapeError("no subgraph named '" + name + "'");
}

std::vector<int> ModelGraph::owner() const {
  std::vector<int> own(nodes_.size(), -1);
  for (size_t s = 0; s < subgraphs_.size(); ++s) {
    for (int n : subgraphs_[s].nodes) {
      if (n < 0 || n >= static_cast<int>(nodes_.size()))
        throw ShapeError("subgraph '" + subgraphs_[s].name + "' references a missing node");
      if (own[n] >= 0) throw ShapeError(node_label(*this, n) + " belongs to two subgraphs");
      own[n] = static_cast<int>(s);
    }
  }
  return own;
}

void ModelGraph::validate() const {
  for (const ModelNode& n : nodes_) n.validate();
  const std::vector<int> own = owner();
  for (size_t n = 0; n < own.size(); ++n)
    if (own[n] < 0) throw ShapeError(node_label(*this, static_cast<int>(n)) + " is in no subgraph");
  for (const LinkConstraint& e : edges_) {
    for (const LinkTerm& t : e.terms) {
      if (t.node < 0 || t.node >= static_cast<int>(nodes_.size()) || t.var < 0 ||
          t.var >= static_cast<int>(nodes_[t.node].vars.size()))
        throw ShapeError("link '" + e.name + "' references a missing node or variable");
    }
  }
}

AssembledProblem assemble_monolithic(const ModelGraph& g) {
  g.validate();
  AssembledProblem out;
  out.column.resize(g.nodes().size());
  std::vector<double> c, lb, ub;
  std::vector<int> bin;
  int col = 0;
  for (const Subgraph& s : g.subgraphs()) {
    for (int n : s.nodes) {
      const ModelNode& node = g.nodes()[n];
      for (size_t v = 0; v < node.vars.size(); ++v) {
        out.column[n].push_back(col);
        c.push_back(s.weight * node.total_cost(static_cast<int>(v)));
        lb.push_back(node.vars[v].lb);
        ub.push_back(node.vars[v].ub);
        if (node.vars[v].binary) bin.push_back(col);
        ++col;
      }
    }
  }
  RowSet rows;
  for (const Subgraph& s : g.subgraphs()) {
    for (int n : s.nodes) {
      const ModelNode& node = g.nodes()[n];
      for (size_t r = 0; r < node.rows.size(); ++r) {
        std::vector<std::pair<int, double>> t;
        for (const Term& term : node.rows[r].terms) t.emplace_back(out.column[n][term.var], term.coeff);
        rows.add(t, node.rows[r].sense, node.total_rhs(static_cast<int>(r)), false);
      }
    }
  }
  for (const LinkConstraint& e : g.edges()) {
    std::vector<std::pair<int, double>> t;
    for (const LinkTerm& term : e.terms) t.emplace_back(out.column[term.node][term.var], term.coeff);
    rows.add(t, e.sense, e.rhs, true);
  }
  StandardLp& lp = out.problem.base;
  lp.c = Eigen::Map<const Vec>(c.data(), col);
  lp.lb = Eigen::Map<const Vec>(lb.data(), col);
  lp.ub = Eigen::Map<const Vec>(ub.data(), col);
  rows.finish(lp, col);
  out.problem.binary_idx = bin;
  return out;
}

BendersPartition extract_benders_partition(const ModelGraph& g) {
  g.validate();
  if (!g.master()) throw ShapeError("no master subgraph designated");
  const int ms = *g.master();
  const std::vector<int> own = g.owner();
  const auto& nodes = g.nodes();
  const auto& subgraphs = g.subgraphs();

  BendersPartition out;
  out.master_column.assign(nodes.size(), {});
  // Master columns.
  std::vector<double> c, lb, ub;
  std::vector<int> bin;
  int col = 0;
  for (int n : subgraphs[ms].nodes) {
    const ModelNode& node = nodes[n];
    for (size_t v = 0; v < node.vars.size(); ++v) {
      out.master_column[n].push_back(col);
      c.push_back(subgraphs[ms].weight * node.total_cost(static_cast<int>(v)));
      lb.push_back(node.vars[v].lb);
      ub.push_back(node.vars[v].ub);
      if (node.vars[v].binary) bin.push_back(col);
      ++col;
    }
  }
  RowSet mrows;
  for (int n : subgraphs[ms].nodes) {
    const ModelNode& node = nodes[n];
    for (size_t r = 0; r < node.rows.size(); ++r) {
      std::vector<std::pair<int, double>> t;
      for (const Term& term : node.rows[r].terms) t.emplace_back(out.master_column[n][term.var], term.coeff);
      mrows.add(t, node.rows[r].sense, node.total_rhs(static_cast<int>(r)), false);
    }
  }

  // Classify edges by the non-master subgraph they touch.
  std::vector<std::vector<int>> sub_edges(subgraphs.size());
  for (size_t e = 0; e < g.edges().size(); ++e) {
    const LinkConstraint& link = g.edges()[e];
    std::set<int> others;
    for (const LinkTerm& t : link.terms)
      if (own[t.node] != ms) others.insert(own[t.node]);
    if (others.empty()) {
      std::vector<std::pair<int, double>> t;
      for (const LinkTerm& term : link.terms) t.emplace_back(out.master_column[term.node][term.var], term.coeff);
      mrows.add(t, link.sense, link.rhs, false);
    } else if (others.size() == 1) {
      sub_edges[*others.begin()].push_back(static_cast<int>(e));
    } else {
      throw ShapeError("link '" + link.name + "' couples more than one non-master subgraph");
    }
  }
  StandardLp& mlp = out.master.base;
  mlp.c = Eigen::Map<const Vec>(c.data(), col);
  mlp.lb = Eigen::Map<const Vec>(lb.data(), col);
  mlp.ub = Eigen::Map<const Vec>(ub.data(), col);
  mrows.finish(mlp, col);
  out.master.binary_idx = bin;

  for (size_t s = 0; s < subgraphs.size(); ++s) {
    if (static_cast<int>(s) == ms) continue;
    const Subgraph& sg = subgraphs[s];
    ScenarioSubproblemSpec sp;
    sp.id = sg.name;
    sp.scenario = sg.scenario;
    sp.period = sg.period;
    sp.weight = sg.weight;
    std::map<std::pair<int, int>, int> xcol;
    std::vector<double> cx, xl, xu;
    std::vector<double> cost_vals;
    for (int n : sg.nodes) {
      const ModelNode& node = nodes[n];
      const int base = static_cast<int>(cx.size());
      for (size_t v = 0; v < node.vars.size(); ++v) {
        if (node.vars[v].binary)
          throw ShapeError("subproblem '" + sg.name + "' holds binary variable " + node.vars[v].name);
        xcol[{n, static_cast<int>(v)}] = static_cast<int>(cx.size());
        cx.push_back(node.vars[v].cost);
        xl.push_back(node.vars[v].lb);
        xu.push_back(node.vars[v].ub);
        sp.x_names.push_back(node.name + "." + node.vars[v].name);
      }
      for (const ParamDecl& p : node.params) {
        if (p.kind != ParamKind::Cost) continue;
        sp.cost_slots.push_back(CostSlot{base + p.target, p.scale, p.lo, p.hi, p.name});
        cost_vals.push_back(p.value);
      }
    }
    // Copy variables in order of first reference.
    std::map<int, int> zslot;
    for (int e : sub_edges[s]) {
      for (const LinkTerm& t : g.edges()[e].terms) {
        if (own[t.node] != ms) continue;
        const int mc = out.master_column[t.node][t.var];
        if (zslot.count(mc)) continue;
        zslot[mc] = static_cast<int>(sp.master_cols.size());
        sp.master_cols.push_back(mc);
      }
    }
    const int nx = static_cast<int>(cx.size()), nz = static_cast<int>(sp.master_cols.size());
    sp.c_x = Eigen::Map<const Vec>(cx.data(), nx);
    sp.lb = Eigen::Map<const Vec>(xl.data(), nx);
    sp.ub = Eigen::Map<const Vec>(xu.data(), nx);
    sp.z_lo = Vec(nz);
    sp.z_hi = Vec(nz);
    for (int k = 0; k < nz; ++k) {
      sp.z_lo[k] = mlp.lb[sp.master_cols[k]];
      sp.z_hi[k] = mlp.ub[sp.master_cols[k]];
    }
    sp.cost_values = Eigen::Map<const Vec>(cost_vals.data(), static_cast<int>(cost_vals.size()));

    // Rows: dense, since subproblems are small.
    std::vector<std::vector<double>> A, C, Ae, Ce;
    std::vector<double> q, qe;
    std::vector<double> rhs_vals;
    auto emit = [&](const std::vector<std::pair<int, double>>& xt,
                    const std::vector<std::pair<int, double>>& zt, Sense sense, double rhs,
                    const std::vector<const ParamDecl*>& params) {
      const bool eq = sense == Sense::Eq;
      const double sign = sense == Sense::Ge ? -1.0 : 1.0;
      std::vector<double> ar(nx, 0.0), cr(nz, 0.0);
      for (auto [j, v] : xt) ar[j] += sign * v;
      for (auto [k, v] : zt) cr[k] += sign * v;
      auto& AA = eq ? Ae : A;
      auto& CC = eq ? Ce : C;
      auto& qq = eq ? qe : q;
      const int row = static_cast<int>(qq.size());
      AA.push_back(ar);
      CC.push_back(cr);
      qq.push_back(sign * rhs);
      for (const ParamDecl* p : params) {
        sp.rhs_slots.push_back(RhsSlot{row, eq, sign * p->scale, p->lo, p->hi, p->name});
        rhs_vals.push_back(p->value);
      }
    };
    for (int n : sg.nodes) {
      const ModelNode& node = nodes[n];
      for (size_t r = 0; r < node.rows.size(); ++r) {
        std::vector<std::pair<int, double>> xt;
        for (const Term& t : node.rows[r].terms) xt.emplace_back(xcol[{n, t.var}], t.coeff);
        std::vector<const ParamDecl*> ps;
        for (const ParamDecl& p : node.params)
          if (p.kind == ParamKind::Rhs && p.target == static_cast<int>(r)) ps.push_back(&p);
        emit(xt, {}, node.rows[r].sense, node.rows[r].rhs, ps);
      }
    }
    for (int e : sub_edges[s]) {
      const LinkConstraint& link = g.edges()[e];
      std::vector<std::pair<int, double>> xt, zt;
      for (const LinkTerm& t : link.terms) {
        if (own[t.node] == ms) zt.emplace_back(zslot[out.master_column[t.node][t.var]], t.coeff);
        else xt.emplace_back(xcol[{t.node, t.var}], t.coeff);
      }
      emit(xt, zt, link.sense, link.rhs, {});
    }
    auto to_mat = [](const std::vector<std::vector<double>>& rows, int cols) {
      Mat m(rows.size(), cols);
      for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rows[i][j];
      return m;
    };
    sp.A = to_mat(A, nx);
    sp.C = to_mat(C, nz);
    sp.q = Eigen::Map<const Vec>(q.data(), static_cast<int>(q.size()));
    sp.A_eq = to_mat(Ae, nx);
    sp.C_eq = to_mat(Ce, nz);
    sp.q_eq = Eigen::Map<const Vec>(qe.data(), static_cast<int>(qe.size()));
    sp.rhs_values = Eigen::Map<const Vec>(rhs_vals.data(), static_cast<int>(rhs_vals.size()));
    sp.validate();
    out.subs.push_back(std::move(sp));
  }
  return out;
}

}  // namespace mpb
