#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mpbenders/linalg.hpp"

namespace mpb {

// min c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lb <= x <= ub.
// Bounds may be +-kInf; rows of b_ub may be +kInf (never binding).
struct StandardLp {
  Vec c;
  SpMat A_ub;
  Vec b_ub;
  SpMat A_eq;
  Vec b_eq;
  Vec lb;
  Vec ub;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_ub() const { return static_cast<int>(b_ub.size()); }
  int num_eq() const { return static_cast<int>(b_eq.size()); }

  // Throws DimensionMismatch on inconsistent shapes or lb > ub.
  void validate() const;

  // An LP over n variables with no rows and x >= 0.
  static StandardLp empty(int n);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, Free, Fixed };

// Simplex basis over the n structural columns followed by one logical
// column per row (ub rows first, then eq rows).
struct Basis {
  std::vector<int> head;
  std::vector<VarStatus> status;

  bool empty() const { return head.empty() && status.empty(); }
};

// Basis for the same problem after `added` ub rows were appended to A_ub
// (n structurals, num_ub ub rows before the append). The new rows' logicals
// enter the basis.
Basis extend_basis(const Basis& b, int n, int num_ub, int added);

struct LpOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_every = 100;
  // 0 picks a cap proportional to problem size.
  long max_iter = 0;
  // Start from this basis when its shape matches the problem.
  const Basis* warm_start = nullptr;
  // After optimality, pivot free structurals into the basis and fixed
  // logicals out of it so the basis describes a vertex.
  bool vertex_basis = false;
  // Tightness tolerance used for LpSolution::active_set.
  double active_tol = 1e-7;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double objective = 0.0;
  // Nonnegative; objective rises by dual_ub[i] per unit tightening of row i.
  Vec dual_ub;
  Vec dual_eq;
  // Multipliers on variable bounds: c + A_ub' dual_ub + A_eq' dual_eq + bound_duals = 0.
  Vec bound_duals;
  // Tight ub rows (indices into A_ub) followed by every eq row, numbered
  // num_ub() + k for eq row k.
  std::vector<int> active_set;
  // Set by solve_lp_fixed only: d objective / d value, one per fixed index in
  // ascending index order.
  Vec fixing_duals;
  // Improving direction in x when Unbounded.
  Vec ray;
  Basis basis;
  long iterations = 0;
};

LpSolution solve_lp(const StandardLp& lp, const LpOptions& opt = {});

// Solves lp with extra equality rows x[j] = value for every entry of fixed.
// The extra rows come after lp's own eq rows in dual_eq.
LpSolution solve_lp_fixed(const StandardLp& lp, const std::map<int, double>& fixed,
                          const LpOptions& opt = {});

}  // namespace mpb
