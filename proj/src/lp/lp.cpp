#include "mpbenders/lp.hpp"

#include <cmath>
#include <string>

#include "mpbenders/errors.hpp"
#include "simplex.hpp"

namespace mpb {

namespace {

std::string shape(const SpMat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

SpMat stack_rows(const SpMat& top, const SpMat& bottom, int n) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(top.nonZeros() + bottom.nonZeros());
  for (int j = 0; j < top.outerSize(); ++j)
    for (SpMat::InnerIterator it(top, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int j = 0; j < bottom.outerSize(); ++j)
    for (SpMat::InnerIterator it(bottom, j); it; ++it)
      t.emplace_back(top.rows() + it.row(), it.col(), it.value());
  SpMat out(top.rows() + bottom.rows(), n);
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

void StandardLp::validate() const {
  const int n = num_vars();
  auto fail = [](const std::string& w) { throw DimensionMismatch("StandardLp: " + w); };
  if (A_ub.cols() != n && !(A_ub.rows() == 0 && A_ub.cols() == 0))
    fail("A_ub is " + shape(A_ub) + " but c has " + std::to_string(n) + " entries");
  if (A_eq.cols() != n && !(A_eq.rows() == 0 && A_eq.cols() == 0))
    fail("A_eq is " + shape(A_eq) + " but c has " + std::to_string(n) + " entries");
  if (A_ub.rows() != b_ub.size()) fail("A_ub rows != len(b_ub)");
  if (A_eq.rows() != b_eq.size()) fail("A_eq rows != len(b_eq)");
  if (lb.size() != n || ub.size() != n) fail("bound vectors must have len(c) entries");
  for (int j = 0; j < n; ++j) {
    if (std::isnan(lb[j]) || std::isnan(ub[j]) || lb[j] > ub[j])
      fail("bad bounds on variable " + std::to_string(j));
  }
}

StandardLp StandardLp::empty(int n) {
  StandardLp lp;
  lp.c = Vec::Zero(n);
  lp.A_ub = SpMat(0, n);
  lp.b_ub = Vec(0);
  lp.A_eq = SpMat(0, n);
  lp.b_eq = Vec(0);
  lp.lb = Vec::Zero(n);
  lp.ub = Vec::Constant(n, kInf);
  return lp;
}

LpSolution solve_lp(const StandardLp& lp, const LpOptions& opt) {
  lp.validate();
  const int n = lp.num_vars();
  const int mu = lp.num_ub(), me = lp.num_eq();
  const int m = mu + me;
  SpMat Aub = lp.A_ub.rows() == 0 ? SpMat(0, n) : lp.A_ub;
  SpMat Aeq = lp.A_eq.rows() == 0 ? SpMat(0, n) : lp.A_eq;
  const SpMat A = stack_rows(Aub, Aeq, n);

  Vec cost = Vec::Zero(n + m), lo(n + m), up(n + m);
  cost.head(n) = lp.c;
  lo.head(n) = lp.lb;
  up.head(n) = lp.ub;
  for (int i = 0; i < mu; ++i) {
    lo[n + i] = -kInf;
    up[n + i] = lp.b_ub[i];
  }
  for (int i = 0; i < me; ++i) {
    lo[n + mu + i] = lp.b_eq[i];
    up[n + mu + i] = lp.b_eq[i];
  }

  detail::Simplex spx(A, cost, lo, up, opt);
  LpSolution sol;
  sol.status = spx.solve();
  sol.iterations = spx.iterations();
  sol.basis = spx.basis();
  const Vec& v = spx.values();
  sol.x = v.head(n);
  if (sol.status == LpStatus::Unbounded) sol.ray = spx.ray();
  if (sol.status != LpStatus::Optimal) return sol;

  sol.objective = lp.c.dot(sol.x);
  const Vec y = spx.row_prices();
  const Vec d = spx.reduced_costs(y);
  sol.dual_ub = -y.head(mu);
  sol.dual_eq = -y.tail(me);
  sol.bound_duals = -d.head(n);
  const Vec ax = Aub * sol.x;
  for (int i = 0; i < mu; ++i) {
    if (std::abs(lp.b_ub[i] - ax[i]) <= opt.active_tol * (1.0 + std::abs(lp.b_ub[i])))
      sol.active_set.push_back(i);
  }
  for (int i = 0; i < me; ++i) sol.active_set.push_back(mu + i);
  return sol;
}

LpSolution solve_lp_fixed(const StandardLp& lp, const std::map<int, double>& fixed,
                          const LpOptions& opt) {
  if (fixed.empty()) return solve_lp(lp, opt);
  const int n = lp.num_vars();
  StandardLp ext = lp;
  const int me = lp.num_eq();
  const int k = static_cast<int>(fixed.size());
  SpMat F(k, n);
  std::vector<Eigen::Triplet<double>> t;
  ext.b_eq.conservativeResize(me + k);
  int row = 0;
  for (const auto& [j, value] : fixed) {
    if (j < 0 || j >= n)
      throw DimensionMismatch("solve_lp_fixed: index " + std::to_string(j) + " out of range");
    t.emplace_back(row, j, 1.0);
    ext.b_eq[me + row] = value;
    ++row;
  }
  F.setFromTriplets(t.begin(), t.end());
  ext.A_eq = stack_rows(lp.A_eq.rows() == 0 ? SpMat(0, n) : lp.A_eq, F, n);
  LpSolution sol = solve_lp(ext, opt);
  if (sol.status == LpStatus::Optimal) sol.fixing_duals = -sol.dual_eq.tail(k);
  return sol;
}

Basis extend_basis(const Basis& b, int n, int num_ub, int added) {
  const int split = n + num_ub;
  Basis out;
  out.head.reserve(b.head.size() + added);
  for (int j : b.head) out.head.push_back(j < split ? j : j + added);
  for (int k = 0; k < added; ++k) out.head.push_back(split + k);
  out.status.reserve(b.status.size() + added);
  out.status.insert(out.status.end(), b.status.begin(), b.status.begin() + std::min<size_t>(split, b.status.size()));
  out.status.insert(out.status.end(), added, VarStatus::Basic);
  if (b.status.size() > static_cast<size_t>(split))
    out.status.insert(out.status.end(), b.status.begin() + split, b.status.end());
  return out;
}

}  // namespace mpb
