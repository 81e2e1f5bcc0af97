#include <cmath>
#include <string>

#include "mpbenders/errors.hpp"
#include "mpbenders/mplp.hpp"

namespace mpb {

void ScenarioSubproblemSpec::validate() const {
  const int n = n_x(), nz = n_z();
  auto fail = [this](const std::string& w) {
    throw DimensionMismatch("subproblem " + id + ": " + w);
  };
  if (lb.size() != n || ub.size() != n) fail("bounds must have one entry per x variable");
  if (A.rows() != q.size() || C.rows() != q.size()) fail("A, C and q row counts differ");
  if (A_eq.rows() != q_eq.size() || C_eq.rows() != q_eq.size()) fail("A_eq, C_eq and q_eq row counts differ");
  if ((A.rows() && A.cols() != n) || (A_eq.rows() && A_eq.cols() != n)) fail("A/A_eq column count != n_x");
  if ((C.rows() && C.cols() != nz) || (C_eq.rows() && C_eq.cols() != nz)) fail("C/C_eq column count != n_z");
  if (z_lo.size() != nz || z_hi.size() != nz) fail("z bounds must have one entry per copy variable");
  if (cost_values.size() != static_cast<int>(cost_slots.size())) fail("cost_values size");
  if (rhs_values.size() != static_cast<int>(rhs_slots.size())) fail("rhs_values size");
  for (const CostSlot& s : cost_slots)
    if (s.var < 0 || s.var >= n) fail("cost slot variable out of range");
  for (const RhsSlot& s : rhs_slots)
    if (s.row < 0 || s.row >= (s.eq ? q_eq.size() : q.size())) fail("rhs slot row out of range");
}

StandardLp ScenarioSubproblemSpec::to_lp() const {
  validate();
  const int n = n_x(), nz = n_z();
  StandardLp lp;
  lp.c = Vec::Zero(n + nz);
  lp.c.head(n) = c_x;
  for (size_t s = 0; s < cost_slots.size(); ++s)
    lp.c[cost_slots[s].var] += cost_slots[s].scale * cost_values[s];
  Mat Aub(q.size(), n + nz), Aeq(q_eq.size(), n + nz);
  if (q.size()) Aub << A, C;
  if (q_eq.size()) Aeq << A_eq, C_eq;
  lp.A_ub = to_sparse(Aub);
  lp.A_eq = to_sparse(Aeq);
  lp.b_ub = q;
  lp.b_eq = q_eq;
  for (size_t s = 0; s < rhs_slots.size(); ++s) {
    const RhsSlot& r = rhs_slots[s];
    (r.eq ? lp.b_eq : lp.b_ub)[r.row] += r.scale * rhs_values[s];
  }
  lp.lb = Vec::Constant(n + nz, -kInf);
  lp.ub = Vec::Constant(n + nz, kInf);
  lp.lb.head(n) = lb;
  lp.ub.head(n) = ub;
  return lp;
}

Vec ScenarioSubproblemSpec::theta(const Vec& z) const {
  Vec t(z.size() + cost_values.size() + rhs_values.size());
  t << z, cost_values, rhs_values;
  return t;
}

Embedding embed_subproblem(const ScenarioSubproblemSpec& sub) {
  sub.validate();
  const int n = sub.n_x(), nz = sub.n_z();
  const int ncs = static_cast<int>(sub.cost_slots.size());
  const int nrs = static_cast<int>(sub.rhs_slots.size());
  const int td = nz + ncs + nrs;

  Embedding out;
  std::vector<int> col_of(n, -1);
  for (int j = 0; j < n; ++j) {
    if (sub.lb[j] == 0.0 && sub.ub[j] == 0.0) continue;
    col_of[j] = static_cast<int>(out.source_col.size());
    out.source_col.push_back(j);
  }
  const int nk = static_cast<int>(out.source_col.size());
  for (int k = 0; k < nz; ++k) out.source_col.push_back(n + k);
  const int xd = nk + nz;

  for (int k = 0; k < nz; ++k) out.layout.master_idx.push_back(k);
  for (int s = 0; s < ncs; ++s) out.layout.cost_idx.push_back(nz + s);
  for (int s = 0; s < nrs; ++s) out.layout.rhs_idx.push_back(nz + ncs + s);

  MpLp& p = out.problem;
  p.c = Vec::Zero(xd);
  p.H = Mat::Zero(xd, td);
  for (int j = 0; j < n; ++j)
    if (col_of[j] >= 0) p.c[col_of[j]] = sub.c_x[j];
  for (int s = 0; s < ncs; ++s) {
    const int j = sub.cost_slots[s].var;
    if (col_of[j] >= 0) p.H(col_of[j], nz + s) = sub.cost_slots[s].scale;
  }

  // Inequalities: coupled rows, then finite bounds of the kept x variables.
  int nbound = 0;
  for (int j = 0; j < n; ++j) {
    if (col_of[j] < 0) continue;
    nbound += std::isfinite(sub.lb[j]) + std::isfinite(sub.ub[j]);
  }
  const int mr = static_cast<int>(sub.q.size());
  p.A = Mat::Zero(mr + nbound, xd);
  p.b = Vec::Zero(mr + nbound);
  p.F = Mat::Zero(mr + nbound, td);
  for (int i = 0; i < mr; ++i) {
    for (int j = 0; j < n; ++j)
      if (col_of[j] >= 0) p.A(i, col_of[j]) = sub.A(i, j);
    for (int k = 0; k < nz; ++k) p.A(i, nk + k) = sub.C(i, k);
    p.b[i] = sub.q[i];
  }
  int row = mr;
  for (int j = 0; j < n; ++j) {
    if (col_of[j] < 0) continue;
    if (std::isfinite(sub.lb[j])) {
      p.A(row, col_of[j]) = -1.0;
      p.b[row++] = -sub.lb[j];
    }
    if (std::isfinite(sub.ub[j])) {
      p.A(row, col_of[j]) = 1.0;
      p.b[row++] = sub.ub[j];
    }
  }

  // Equalities: coupled rows, then z = master slots.
  const int me = static_cast<int>(sub.q_eq.size());
  p.A_eq = Mat::Zero(me + nz, xd);
  p.b_eq = Vec::Zero(me + nz);
  p.F_eq = Mat::Zero(me + nz, td);
  for (int i = 0; i < me; ++i) {
    for (int j = 0; j < n; ++j)
      if (col_of[j] >= 0) p.A_eq(i, col_of[j]) = sub.A_eq(i, j);
    for (int k = 0; k < nz; ++k) p.A_eq(i, nk + k) = sub.C_eq(i, k);
    p.b_eq[i] = sub.q_eq[i];
  }
  for (int k = 0; k < nz; ++k) {
    p.A_eq(me + k, nk + k) = 1.0;
    p.F_eq(me + k, k) = 1.0;
  }
  for (int s = 0; s < nrs; ++s) {
    const RhsSlot& r = sub.rhs_slots[s];
    (r.eq ? p.F_eq : p.F)(r.row, nz + ncs + s) = r.scale;
  }

  // Theta box.
  Vec lo(td), hi(td);
  for (int k = 0; k < nz; ++k) {
    lo[k] = sub.z_lo[k];
    hi[k] = sub.z_hi[k];
  }
  for (int s = 0; s < ncs; ++s) {
    lo[nz + s] = sub.cost_slots[s].lo;
    hi[nz + s] = sub.cost_slots[s].hi;
  }
  for (int s = 0; s < nrs; ++s) {
    lo[nz + ncs + s] = sub.rhs_slots[s].lo;
    hi[nz + ncs + s] = sub.rhs_slots[s].hi;
  }
  if (!lo.allFinite() || !hi.allFinite() || (lo.array() > hi.array()).any())
    throw DimensionMismatch("subproblem " + sub.id + ": parameter bounds must be finite with lo <= hi");
  p.A_theta = Mat::Zero(2 * td, td);
  p.b_theta = Vec(2 * td);
  for (int k = 0; k < td; ++k) {
    p.A_theta(2 * k, k) = 1.0;
    p.b_theta[2 * k] = hi[k];
    p.A_theta(2 * k + 1, k) = -1.0;
    p.b_theta[2 * k + 1] = -lo[k];
  }
  return out;
}

}  // namespace mpb
