#include "mpbenders/polytope.hpp"

#include <cmath>

#include "mpbenders/errors.hpp"
#include "mpbenders/lp.hpp"

namespace mpb {

namespace {

LpOptions tight() {
  LpOptions o;
  o.primal_tol = 1e-11;
  o.dual_tol = 1e-11;
  return o;
}

StandardLp free_lp(const Mat& E, const Vec& f, int extra) {
  const int d = static_cast<int>(E.cols());
  StandardLp lp;
  lp.c = Vec::Zero(d + extra);
  Mat A(E.rows(), d + extra);
  A.leftCols(d) = E;
  if (extra) A.rightCols(extra).setZero();
  lp.A_ub = to_sparse(A);
  lp.b_ub = f;
  lp.A_eq = SpMat(0, d + extra);
  lp.b_eq = Vec(0);
  lp.lb = Vec::Constant(d + extra, -kInf);
  lp.ub = Vec::Constant(d + extra, kInf);
  return lp;
}

}  // namespace

bool normalize_rows(Polytope& p, double tol) {
  std::vector<int> keep;
  for (int i = 0; i < p.E.rows(); ++i) {
    const double nrm = p.E.row(i).norm();
    if (nrm <= tol) {
      if (p.f[i] < -tol) return false;
      continue;
    }
    p.E.row(i) /= nrm;
    p.f[i] /= nrm;
    keep.push_back(i);
  }
  if (static_cast<int>(keep.size()) != p.E.rows()) {
    Mat E(keep.size(), p.E.cols());
    Vec f(keep.size());
    for (size_t k = 0; k < keep.size(); ++k) {
      E.row(k) = p.E.row(keep[k]);
      f[k] = p.f[keep[k]];
    }
    p.E = std::move(E);
    p.f = std::move(f);
  }
  return true;
}

Ball chebyshev_ball(const Polytope& p) {
  const int d = static_cast<int>(p.E.cols());
  StandardLp lp = free_lp(p.E, p.f, 1);
  Mat A(lp.A_ub);
  for (int i = 0; i < p.E.rows(); ++i) A(i, d) = p.E.row(i).norm();
  lp.A_ub = to_sparse(A);
  lp.c[d] = -1.0;
  lp.lb[d] = 0.0;
  Ball b;
  const LpSolution s = solve_lp(lp, tight());
  if (s.status == LpStatus::Infeasible) return b;
  if (s.status == LpStatus::Unbounded) throw NumericalFailure("chebyshev_ball: unbounded polytope");
  b.empty = false;
  b.center = s.x.head(d);
  b.radius = s.x[d];
  return b;
}

std::vector<int> remove_redundant_rows(Polytope& p, double tol) {
  const int m = static_cast<int>(p.E.rows());
  std::vector<bool> active(m, true);
  // Exact duplicates first (rows assumed normalized).
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i && active[i]; ++j) {
      if (!active[j]) continue;
      if ((p.E.row(i) - p.E.row(j)).cwiseAbs().maxCoeff() <= 1e-12) {
        if (p.f[i] < p.f[j]) active[j] = false;
        else active[i] = false;
      }
    }
  }
  // A row whose hyperplane passes through the projection of an interior
  // point that strictly satisfies every other row is a facet; no LP needed.
  std::vector<bool> facet(m, false);
  if (const Ball b = chebyshev_ball(p); !b.empty && b.radius > 0.0) {
    for (int i = 0; i < m; ++i) {
      if (!active[i]) continue;
      const double nn = p.E.row(i).squaredNorm();
      if (nn == 0.0) continue;
      const Vec q = b.center + (p.f[i] - p.E.row(i).dot(b.center)) / nn * p.E.row(i).transpose();
      bool strict = true;
      for (int j = 0; j < m && strict; ++j)
        if (j != i && active[j]) strict = p.E.row(j).dot(q) < p.f[j] - 1e-9;
      facet[i] = strict;
    }
  }
  for (int i = 0; i < m; ++i) {
    if (!active[i] || facet[i]) continue;
    std::vector<int> rows;
    for (int j = 0; j < m; ++j)
      if (active[j]) rows.push_back(j);
    Mat E(rows.size(), p.E.cols());
    Vec f(rows.size());
    for (size_t k = 0; k < rows.size(); ++k) {
      E.row(k) = p.E.row(rows[k]);
      f[k] = p.f[rows[k]] + (rows[k] == i ? 1.0 : 0.0);
    }
    StandardLp lp = free_lp(E, f, 0);
    lp.c = -p.E.row(i).transpose();
    const LpSolution s = solve_lp(lp, tight());
    if (s.status != LpStatus::Optimal) continue;
    if (-s.objective <= p.f[i] + tol) active[i] = false;
  }
  std::vector<int> kept;
  for (int i = 0; i < m; ++i)
    if (active[i]) kept.push_back(i);
  Mat E(kept.size(), p.E.cols());
  Vec f(kept.size());
  for (size_t k = 0; k < kept.size(); ++k) {
    E.row(k) = p.E.row(kept[k]);
    f[k] = p.f[kept[k]];
  }
  p.E = std::move(E);
  p.f = std::move(f);
  return kept;
}

void bounding_box(const Polytope& p, Vec& lo, Vec& hi) {
  const int d = static_cast<int>(p.E.cols());
  lo.resize(d);
  hi.resize(d);
  StandardLp lp = free_lp(p.E, p.f, 0);
  Basis warm;
  for (int k = 0; k < d; ++k) {
    for (int sgn : {1, -1}) {
      lp.c.setZero();
      lp.c[k] = sgn;
      LpOptions o = tight();
      if (!warm.empty()) o.warm_start = &warm;
      const LpSolution s = solve_lp(lp, o);
      if (s.status != LpStatus::Optimal) {
        lo[k] = -kInf;
        hi[k] = kInf;
        continue;
      }
      warm = s.basis;
      if (sgn > 0) lo[k] = s.objective;
      else hi[k] = -s.objective;
    }
  }
}

}  // namespace mpb
