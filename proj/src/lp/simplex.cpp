#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpbenders/errors.hpp"

namespace mpb::detail {

namespace {

constexpr double kDegenerateStep = 1e-12;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Simplex::Simplex(const SpMat& A, const Vec& cost, const Vec& lo, const Vec& up,
                 const LpOptions& opt)
    : A_(A),
      m_(static_cast<int>(A.rows())),
      n_(static_cast<int>(A.cols())),
      N_(m_ + n_),
      cost_(cost),
      lo_(lo),
      up_(up),
      opt_(opt) {
  max_iter_ = opt_.max_iter > 0 ? opt_.max_iter : 50L * (m_ + N_) + 10000;
  x_ = Vec::Zero(N_);
}

void Simplex::set_nonbasic_value(int j) {
  const double l = lo_[j], u = up_[j];
  VarStatus& s = status_[j];
  if (finite(l) && finite(u) && l == u) {
    s = VarStatus::Fixed;
  } else if (s == VarStatus::AtUpper && finite(u)) {
    s = VarStatus::AtUpper;
  } else if (s == VarStatus::AtLower && finite(l)) {
    s = VarStatus::AtLower;
  } else if (finite(l)) {
    s = VarStatus::AtLower;
  } else if (finite(u)) {
    s = VarStatus::AtUpper;
  } else {
    s = VarStatus::Free;
  }
  switch (s) {
    case VarStatus::Fixed:
    case VarStatus::AtLower: x_[j] = l; break;
    case VarStatus::AtUpper: x_[j] = u; break;
    default: x_[j] = 0.0; break;
  }
}

void Simplex::set_initial_basis() {
  head_.assign(m_, -1);
  pos_.assign(N_, -1);
  status_.assign(N_, VarStatus::AtLower);
  const Basis* w = opt_.warm_start;
  bool warm = w != nullptr && static_cast<int>(w->head.size()) == m_ &&
              static_cast<int>(w->status.size()) == N_;
  if (warm) {
    for (int k = 0; k < m_ && warm; ++k) {
      const int j = w->head[k];
      if (j < 0 || j >= N_ || pos_[j] >= 0) warm = false;
      else pos_[j] = k;
    }
    if (!warm) pos_.assign(N_, -1);
  }
  if (warm) {
    head_ = w->head;
    for (int j = 0; j < N_; ++j) status_[j] = w->status[j];
    for (int k = 0; k < m_; ++k) status_[head_[k]] = VarStatus::Basic;
  } else {
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      pos_[n_ + i] = i;
      status_[n_ + i] = VarStatus::Basic;
    }
  }
  for (int j = 0; j < N_; ++j) {
    if (pos_[j] < 0) {
      if (status_[j] == VarStatus::Basic) status_[j] = VarStatus::AtLower;
      set_nonbasic_value(j);
    }
  }
}

void Simplex::column(int j, Vec& out) const {
  out.setZero(m_);
  if (j < n_) {
    for (SpMat::InnerIterator it(A_, j); it; ++it) out[it.row()] = it.value();
  } else {
    out[j - n_] = -1.0;
  }
}

double Simplex::dot_column(int j, const Vec& y) const {
  if (j >= n_) return -y[j - n_];
  double s = 0.0;
  for (SpMat::InnerIterator it(A_, j); it; ++it) s += it.value() * y[it.row()];
  return s;
}

void Simplex::refactor() {
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      if (j < n_) {
        for (SpMat::InnerIterator it(A_, j); it; ++it) trips.emplace_back(it.row(), k, it.value());
      } else {
        trips.emplace_back(j - n_, k, -1.0);
      }
    }
    SpMat B(m_, m_);
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    if (factor_.factorize(B)) {
      recompute_basics();
      return;
    }
    // Singular basis: fall back to the all-logical basis.
    for (int j = 0; j < N_; ++j) {
      if (status_[j] == VarStatus::Basic) status_[j] = VarStatus::AtLower;
      pos_[j] = -1;
    }
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      pos_[n_ + i] = i;
      status_[n_ + i] = VarStatus::Basic;
    }
    for (int j = 0; j < N_; ++j) {
      if (pos_[j] < 0) set_nonbasic_value(j);
    }
  }
  throw NumericalFailure("simplex: basis factorization failed");
}

void Simplex::recompute_basics() {
  Vec rhs = Vec::Zero(m_);
  for (int j = 0; j < N_; ++j) {
    if (pos_[j] >= 0 || x_[j] == 0.0) continue;
    if (j < n_) {
      for (SpMat::InnerIterator it(A_, j); it; ++it) rhs[it.row()] -= it.value() * x_[j];
    } else {
      rhs[j - n_] += x_[j];
    }
  }
  factor_.ftran(rhs);
  for (int k = 0; k < m_; ++k) x_[head_[k]] = rhs[k];
  fresh_ = true;
}

bool Simplex::phase_costs(Vec& cB) const {
  cB.setZero(m_);
  bool infeasible = false;
  for (int k = 0; k < m_; ++k) {
    const int j = head_[k];
    const double v = x_[j];
    if (v < lo_[j] - opt_.primal_tol) {
      cB[k] = -1.0;
      infeasible = true;
    } else if (v > up_[j] + opt_.primal_tol) {
      cB[k] = 1.0;
      infeasible = true;
    }
  }
  if (!infeasible) {
    for (int k = 0; k < m_; ++k) cB[k] = cost_[head_[k]];
  }
  return infeasible;
}

bool Simplex::basics_feasible() const {
  for (int k = 0; k < m_; ++k) {
    const int j = head_[k];
    if (x_[j] < lo_[j] - opt_.primal_tol || x_[j] > up_[j] + opt_.primal_tol) return false;
  }
  return true;
}

int Simplex::price(const Vec& y, bool phase1, int& dir) const {
  int best = -1;
  double best_score = 0.0;
  const double tol = opt_.dual_tol;
  for (int j = 0; j < N_; ++j) {
    const VarStatus s = status_[j];
    if (s == VarStatus::Basic || s == VarStatus::Fixed) continue;
    const double d = (phase1 ? 0.0 : cost_[j]) - dot_column(j, y);
    int dj = 0;
    if (s == VarStatus::AtLower && d < -tol) dj = 1;
    else if (s == VarStatus::AtUpper && d > tol) dj = -1;
    else if (s == VarStatus::Free && std::abs(d) > tol) dj = d < 0 ? 1 : -1;
    if (dj == 0) continue;
    if (bland_) {
      dir = dj;
      return j;
    }
    if (std::abs(d) > best_score) {
      best_score = std::abs(d);
      best = j;
      dir = dj;
    }
  }
  return best;
}

Simplex::Ratio Simplex::ratio_test(int q, int dir, const Vec& aq, bool phase1) const {
  // Basic k moves by -t * alpha_k.
  struct Cand {
    int k;
    double dist;
    double alpha;
    bool relaxed;
    bool upper;
  };
  std::vector<Cand> cands;
  const double ptol = opt_.primal_tol;
  for (int k = 0; k < m_; ++k) {
    const double alpha = dir * aq[k];
    if (std::abs(alpha) <= opt_.pivot_tol) continue;
    const int j = head_[k];
    const double v = x_[j], l = lo_[j], u = up_[j];
    const bool below = phase1 && v < l - ptol;
    const bool above = phase1 && v > u + ptol;
    if (alpha > 0) {
      if (above) cands.push_back({k, v - u, alpha, false, true});
      else if (below) continue;
      else if (finite(l)) cands.push_back({k, v - l, alpha, true, false});
    } else {
      if (below) cands.push_back({k, l - v, -alpha, false, false});
      else if (above) continue;
      else if (finite(u)) cands.push_back({k, u - v, -alpha, true, true});
    }
  }
  Ratio rt;
  const double span = up_[q] - lo_[q];
  if (bland_) {
    int best_col = -1;
    for (const Cand& c : cands) {
      const double t = std::max(c.dist, 0.0) / c.alpha;
      const int col = head_[c.k];
      if (t < rt.t - kDegenerateStep || (t <= rt.t + kDegenerateStep && col < best_col)) {
        rt.t = t;
        rt.r = c.k;
        rt.leave_at_upper = c.upper;
        best_col = col;
      }
    }
  } else {
    double tmax = kInf;
    for (const Cand& c : cands) {
      tmax = std::min(tmax, (c.dist + (c.relaxed ? ptol : 0.0)) / c.alpha);
    }
    double best_alpha = 0.0;
    for (const Cand& c : cands) {
      const double t = c.dist / c.alpha;
      if (t <= tmax && c.alpha > best_alpha) {
        best_alpha = c.alpha;
        rt.r = c.k;
        rt.t = std::max(t, 0.0);
        rt.leave_at_upper = c.upper;
      }
    }
  }
  if (finite(span) && span <= rt.t) {
    rt.r = -1;
    rt.t = span;
    rt.flip = true;
  }
  return rt;
}

void Simplex::pivot(int q, int dir, const Vec& aq, const Ratio& rt) {
  const double t = rt.t;
  if (t != 0.0) {
    x_[q] += dir * t;
    for (int k = 0; k < m_; ++k) x_[head_[k]] -= t * dir * aq[k];
  }
  if (rt.flip) {
    status_[q] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
    x_[q] = dir > 0 ? up_[q] : lo_[q];
  } else {
    const int leaving = head_[rt.r];
    pos_[leaving] = -1;
    const double l = lo_[leaving], u = up_[leaving];
    if (finite(l) && finite(u) && l == u) {
      status_[leaving] = VarStatus::Fixed;
      x_[leaving] = l;
    } else if (rt.leave_at_upper) {
      status_[leaving] = VarStatus::AtUpper;
      x_[leaving] = u;
    } else {
      status_[leaving] = VarStatus::AtLower;
      x_[leaving] = l;
    }
    head_[rt.r] = q;
    pos_[q] = rt.r;
    status_[q] = VarStatus::Basic;
    factor_.push_eta(rt.r, aq);
  }
  fresh_ = false;
  if (t <= kDegenerateStep) {
    if (++stall_ > 3L * (m_ + n_)) bland_ = true;
  } else {
    stall_ = 0;
    bland_ = false;
  }
}

LpStatus Simplex::solve() {
  set_initial_basis();
  refactor();
  Vec cB, y, aq;
  for (;;) {
    if (iter_ >= max_iter_) {
      throw NumericalFailure("simplex: iteration cap " + std::to_string(max_iter_) + " reached");
    }
    if (factor_.num_etas() >= opt_.refactor_every) refactor();
    const bool phase1 = phase_costs(cB);
    y = cB;
    factor_.btran(y);
    int dir = 0;
    const int q = price(y, phase1, dir);
    if (q < 0) {
      if (!fresh_) {
        refactor();
        continue;
      }
      if (phase1) return LpStatus::Infeasible;
      if (opt_.vertex_basis) make_vertex_basis();
      return LpStatus::Optimal;
    }
    column(q, aq);
    factor_.ftran(aq);
    const Ratio rt = ratio_test(q, dir, aq, phase1);
    ++iter_;
    if (rt.r < 0 && !rt.flip) {
      if (!fresh_) {
        refactor();
        continue;
      }
      if (phase1) throw NumericalFailure("simplex: unbounded phase-1 ray");
      ray_ = Vec::Zero(n_);
      if (q < n_) ray_[q] = dir;
      for (int k = 0; k < m_; ++k) {
        if (head_[k] < n_) ray_[head_[k]] = -dir * aq[k];
      }
      return LpStatus::Unbounded;
    }
    pivot(q, dir, aq, rt);
  }
}

void Simplex::make_vertex_basis() {
  Vec aq, y, cB;
  // Free structurals into the basis. Their reduced costs are zero at an
  // optimum, so the pivot keeps optimality.
  for (int j = 0; j < n_; ++j) {
    if (status_[j] != VarStatus::Free) continue;
    column(j, aq);
    factor_.ftran(aq);
    Ratio rt;
    int dir = 1;
    for (int d : {1, -1}) {
      Ratio cand = ratio_test(j, d, aq, false);
      if (cand.r >= 0 && (rt.r < 0 || cand.t < rt.t)) {
        rt = cand;
        dir = d;
      }
    }
    if (rt.r < 0) continue;
    pivot(j, dir, aq, rt);
    if (factor_.num_etas() >= opt_.refactor_every) refactor();
  }
  // Fixed logicals out of the basis by dual ratio test; primal step is zero.
  for (int k = 0; k < m_; ++k) {
    const int lj = head_[k];
    if (lj < n_ || !(lo_[lj] == up_[lj])) continue;
    phase_costs(cB);
    y = cB;
    factor_.btran(y);
    Vec rho = Vec::Zero(m_);
    rho[k] = 1.0;
    factor_.btran(rho);
    int best = -1;
    double best_ratio = kInf, best_alpha = 0.0;
    for (int j = 0; j < N_; ++j) {
      const VarStatus s = status_[j];
      if (s == VarStatus::Basic || s == VarStatus::Fixed) continue;
      const double alpha = dot_column(j, rho);
      if (std::abs(alpha) <= 1e-7) continue;
      const double d = cost_[j] - dot_column(j, y);
      // Each candidate constrains only the dual step direction it admits, so
      // the global minimum of |d_j / alpha_j| keeps every d_j sign-feasible.
      const double ratio = std::abs(d) / std::abs(alpha);
      const double a = std::abs(alpha);
      if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && a > best_alpha)) {
        best = j;
        best_ratio = ratio;
        best_alpha = a;
      }
    }
    if (best < 0) continue;
    column(best, aq);
    factor_.ftran(aq);
    Ratio rt;
    rt.r = k;
    rt.t = 0.0;
    pivot(best, 1, aq, rt);
    if (factor_.num_etas() >= opt_.refactor_every) refactor();
  }
  refactor();
}

Vec Simplex::row_prices() const {
  Vec cB(m_);
  for (int k = 0; k < m_; ++k) cB[k] = cost_[head_[k]];
  factor_.btran(cB);
  return cB;
}

Vec Simplex::reduced_costs(const Vec& y) const {
  Vec d(N_);
  for (int j = 0; j < N_; ++j) d[j] = cost_[j] - dot_column(j, y);
  return d;
}

Basis Simplex::basis() const {
  Basis b;
  b.head = head_;
  b.status = status_;
  return b;
}

}  // namespace mpb::detail
