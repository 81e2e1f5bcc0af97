#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mpbenders/linalg.hpp"
#include "mpbenders/lp.hpp"

namespace testing_support {

using mpb::kInf;
using mpb::Mat;
using mpb::SpMat;
using mpb::Vec;

struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
  bool coin(double p) { return uniform(0.0, 1.0) < p; }
};

inline SpMat sparse(const Mat& m) { return mpb::to_sparse(m); }

inline mpb::StandardLp make_lp(const Vec& c, const Mat& Aub, const Vec& bub, const Mat& Aeq,
                               const Vec& beq, const Vec& lb, const Vec& ub) {
  mpb::StandardLp lp;
  lp.c = c;
  lp.A_ub = sparse(Aub);
  lp.b_ub = bub;
  lp.A_eq = sparse(Aeq);
  lp.b_eq = beq;
  lp.lb = lb;
  lp.ub = ub;
  return lp;
}

// Random LP that is primal feasible (around a hidden point) and dual
// feasible by construction, so it has a finite optimum. Every variable has
// a finite lower bound, which makes the feasible set pointed.
inline mpb::StandardLp random_bounded_lp(Gen& g, int n, int mub, int meq) {
  Vec x0(n);
  for (int j = 0; j < n; ++j) x0[j] = g.uniform(-2, 2);
  Mat Aub(mub, n), Aeq(meq, n);
  for (int i = 0; i < mub; ++i)
    for (int j = 0; j < n; ++j) Aub(i, j) = g.coin(0.7) ? std::round(g.uniform(-5, 5) * 4) / 4 : 0.0;
  for (int i = 0; i < meq; ++i)
    for (int j = 0; j < n; ++j) Aeq(i, j) = g.coin(0.8) ? g.uniform(-3, 3) : 0.0;
  Vec bub = Aub * x0, beq = Aeq * x0;
  for (int i = 0; i < mub; ++i) bub[i] += g.coin(0.3) ? 0.0 : g.uniform(0, 3);
  Vec lb(n), ub(n);
  for (int j = 0; j < n; ++j) {
    lb[j] = x0[j] - (g.coin(0.2) ? 0.0 : g.uniform(0, 3));
    ub[j] = g.coin(0.4) ? kInf : x0[j] + g.uniform(0, 3);
  }
  Vec u(mub), v(meq);
  for (int i = 0; i < mub; ++i) u[i] = g.coin(0.5) ? g.uniform(0, 2) : 0.0;
  for (int i = 0; i < meq; ++i) v[i] = g.uniform(-2, 2);
  Vec c = -Aub.transpose() * u - Aeq.transpose() * v;
  for (int j = 0; j < n; ++j) {
    c[j] += g.coin(0.6) ? g.uniform(0, 2) : 0.0;
    if (std::isfinite(ub[j]) && g.coin(0.3)) c[j] -= g.uniform(0, 2);
  }
  return make_lp(c, Aub, bub, Aeq, beq, lb, ub);
}

// Brute-force optimum by enumerating vertices of a pointed LP. Returns
// +inf when no feasible vertex exists.
inline double vertex_oracle(const mpb::StandardLp& lp, Vec* best_x = nullptr) {
  const int n = lp.num_vars();
  Mat Aub(lp.A_ub), Aeq(lp.A_eq);
  std::vector<Vec> rows;
  std::vector<double> rhs;
  for (int i = 0; i < Aub.rows(); ++i) {
    rows.push_back(Aub.row(i).transpose());
    rhs.push_back(lp.b_ub[i]);
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lp.lb[j])) {
      rows.push_back(Vec::Unit(n, j));
      rhs.push_back(lp.lb[j]);
    }
    if (std::isfinite(lp.ub[j])) {
      rows.push_back(Vec::Unit(n, j));
      rhs.push_back(lp.ub[j]);
    }
  }
  const int me = static_cast<int>(Aeq.rows());
  const int need = n - me;
  const int R = static_cast<int>(rows.size());
  double best = kInf;
  if (need < 0) return best;
  std::vector<int> pick(need);
  for (int i = 0; i < need; ++i) pick[i] = i;
  auto feasible = [&](const Vec& x) {
    const double tol = 1e-8;
    if (Aub.rows() && ((Aub * x - lp.b_ub).array() > tol * (1 + lp.b_ub.cwiseAbs().array())).any())
      return false;
    if (me && ((Aeq * x - lp.b_eq).cwiseAbs().array() > tol * (1 + lp.b_eq.cwiseAbs().array())).any())
      return false;
    for (int j = 0; j < n; ++j)
      if (x[j] < lp.lb[j] - tol * (1 + std::abs(lp.lb[j])) || x[j] > lp.ub[j] + tol * (1 + std::abs(lp.ub[j])))
        return false;
    return true;
  };
  if (need > R) return best;
  for (;;) {
    Mat M(n, n);
    Vec r(n);
    for (int i = 0; i < me; ++i) {
      M.row(i) = Aeq.row(i);
      r[i] = lp.b_eq[i];
    }
    for (int k = 0; k < need; ++k) {
      M.row(me + k) = rows[pick[k]].transpose();
      r[me + k] = rhs[pick[k]];
    }
    Eigen::FullPivLU<Mat> lu(M);
    if (lu.rank() == n) {
      Vec x = lu.solve(r);
      if (feasible(x)) {
        const double obj = lp.c.dot(x);
        if (obj < best) {
          best = obj;
          if (best_x) *best_x = x;
        }
      }
    }
    int i = need - 1;
    while (i >= 0 && pick[i] == R - need + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < need; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

struct Kkt {
  double primal = 0, stationarity = 0, complementarity = 0, dual_sign = 0, duality_gap = 0;
  double worst() const {
    return std::max({primal, stationarity, complementarity, dual_sign});
  }
};

inline Kkt kkt_residuals(const mpb::StandardLp& lp, const mpb::LpSolution& s) {
  Kkt k;
  const int n = lp.num_vars();
  const Vec& x = s.x;
  const Vec rub = lp.b_ub - lp.A_ub * x;
  const Vec req = lp.A_eq * x - lp.b_eq;
  for (int i = 0; i < rub.size(); ++i) k.primal = std::max(k.primal, -rub[i]);
  if (req.size()) k.primal = std::max(k.primal, req.cwiseAbs().maxCoeff());
  for (int j = 0; j < n; ++j) {
    k.primal = std::max({k.primal, lp.lb[j] - x[j], x[j] - lp.ub[j]});
  }
  Vec st = lp.c + SpMat(lp.A_ub.transpose()) * s.dual_ub + SpMat(lp.A_eq.transpose()) * s.dual_eq +
           s.bound_duals;
  k.stationarity = st.size() ? st.cwiseAbs().maxCoeff() : 0.0;
  double dual_obj = -lp.b_ub.dot(s.dual_ub) - lp.b_eq.dot(s.dual_eq);
  for (int i = 0; i < rub.size(); ++i) {
    k.dual_sign = std::max(k.dual_sign, -s.dual_ub[i]);
    k.complementarity = std::max(k.complementarity, std::abs(s.dual_ub[i] * rub[i]));
  }
  for (int j = 0; j < n; ++j) {
    const double mu_l = std::max(-s.bound_duals[j], 0.0), mu_u = std::max(s.bound_duals[j], 0.0);
    if (std::isfinite(lp.lb[j])) {
      k.complementarity = std::max(k.complementarity, mu_l * (x[j] - lp.lb[j]));
      dual_obj += mu_l * lp.lb[j];
    } else {
      k.dual_sign = std::max(k.dual_sign, mu_l);
    }
    if (std::isfinite(lp.ub[j])) {
      k.complementarity = std::max(k.complementarity, mu_u * (lp.ub[j] - x[j]));
      dual_obj -= mu_u * lp.ub[j];
    } else {
      k.dual_sign = std::max(k.dual_sign, mu_u);
    }
  }
  k.duality_gap = std::abs(lp.c.dot(x) - dual_obj);
  return k;
}

}  // namespace testing_support
