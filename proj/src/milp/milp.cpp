#include "mpbenders/milp.hpp"

#include <cmath>
#include <memory>
#include <queue>
#include <string>

#include "mpbenders/errors.hpp"

namespace mpb {

void MixedBinaryLp::validate() const {
  base.validate();
  for (int j : binary_idx) {
    if (j < 0 || j >= base.num_vars())
      throw DimensionMismatch("MixedBinaryLp: binary index " + std::to_string(j) + " out of range");
    if (base.lb[j] != 0.0 || base.ub[j] != 1.0)
      throw DimensionMismatch("MixedBinaryLp: binary " + std::to_string(j) + " must have bounds [0,1]");
  }
}

namespace {

struct Node {
  double bound;
  long id;
  // (binary variable, value) decisions along the path from the root.
  std::vector<std::pair<int, int>> fixes;
  std::shared_ptr<const Basis> basis;
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

}  // namespace

MilpSolution solve_milp(const MixedBinaryLp& p, const MilpOptions& opt) {
  p.validate();
  MilpSolution out;
  double incumbent = kInf;
  std::priority_queue<Node, std::vector<Node>, WorseNode> open;
  long next_id = 0;
  open.push(Node{-kInf, next_id++, {}, opt.root_warm_start ? std::make_shared<const Basis>(*opt.root_warm_start) : nullptr});
  StandardLp lp = p.base;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - opt.prune_tol) continue;

    lp.lb = p.base.lb;
    lp.ub = p.base.ub;
    for (auto [j, v] : node.fixes) lp.lb[j] = lp.ub[j] = v;
    LpOptions lo = opt.lp;
    lo.warm_start = node.basis.get();
    LpSolution rel = solve_lp(lp, lo);
    ++out.node_count;
    if (out.node_count == 1 && rel.status == LpStatus::Optimal) out.root_basis = rel.basis;

    if (rel.status == LpStatus::Infeasible) continue;
    if (rel.status == LpStatus::Unbounded) {
      out.status = LpStatus::Unbounded;
      out.x = rel.x;
      return out;
    }
    if (rel.objective >= incumbent - opt.prune_tol) continue;

    int branch = -1;
    double best_frac = opt.tol_int;
    for (int j : p.binary_idx) {
      const double f = std::abs(rel.x[j] - std::round(rel.x[j]));
      if (f > best_frac + 1e-15 || (branch >= 0 && f == best_frac && j < branch)) {
        best_frac = f;
        branch = j;
      }
    }
    if (branch < 0) {
      incumbent = rel.objective;
      out.status = LpStatus::Optimal;
      out.x = rel.x;
      out.objective = rel.objective;
      out.incumbent_history.push_back(rel.objective);
      continue;
    }
    auto basis = std::make_shared<const Basis>(std::move(rel.basis));
    for (int v : {0, 1}) {
      Node child{rel.objective, next_id++, node.fixes, basis};
      child.fixes.emplace_back(branch, v);
      open.push(std::move(child));
    }
  }
  return out;
}

}  // namespace mpb
