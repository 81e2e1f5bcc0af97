#pragma once

#include <vector>

#include "basis_factor.hpp"
#include "mpbenders/lp.hpp"

namespace mpb::detail {

// Bounded revised simplex on  [A  -I] (x; r) = 0,  lo <= (x; r) <= up.
// Column j < n is structural j; column n + i is the logical of row i.
class Simplex {
 public:
  Simplex(const SpMat& A, const Vec& cost, const Vec& lo, const Vec& up, const LpOptions& opt);

  LpStatus solve();

  const Vec& values() const { return x_; }
  // Row prices y = B^{-T} c_B at the final basis (d obj / d row bound).
  Vec row_prices() const;
  // Reduced costs c - [A -I]' y over all columns.
  Vec reduced_costs(const Vec& y) const;
  Basis basis() const;
  Vec ray() const { return ray_; }
  long iterations() const { return iter_; }

 private:
  void set_initial_basis();
  void set_nonbasic_value(int j);
  void refactor();
  void recompute_basics();
  void column(int j, Vec& out) const;
  double dot_column(int j, const Vec& y) const;
  bool basics_feasible() const;
  // Returns true when some basic is infeasible; fills cB with phase costs.
  bool phase_costs(Vec& cB) const;
  int price(const Vec& y, bool phase1, int& dir) const;
  struct Ratio {
    int r = -1;
    double t = kInf;
    bool flip = false;
    bool leave_at_upper = false;
  };
  Ratio ratio_test(int q, int dir, const Vec& aq, bool phase1) const;
  void pivot(int q, int dir, const Vec& aq, const Ratio& rt);
  void make_vertex_basis();

  const SpMat& A_;
  int m_, n_, N_;
  Vec cost_, lo_, up_;
  LpOptions opt_;
  std::vector<int> head_;
  std::vector<int> pos_;
  std::vector<VarStatus> status_;
  Vec x_;
  Vec ray_;
  BasisFactor factor_;
  long iter_ = 0;
  long max_iter_ = 0;
  bool bland_ = false;
  long stall_ = 0;
  bool fresh_ = false;
};

}  // namespace mpb::detail
