#pragma once

#include <vector>

#include "mpbenders/lp.hpp"

namespace mpb {

struct MixedBinaryLp {
  StandardLp base;
  std::vector<int> binary_idx;

  // Throws DimensionMismatch when an index is out of range or a binary's
  // bounds are not [0, 1].
  void validate() const;
};

struct MilpOptions {
  double tol_int = 1e-6;
  double prune_tol = 1e-9;
  LpOptions lp;
  // Starting basis for the root relaxation.
  const Basis* root_warm_start = nullptr;
};

struct MilpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double objective = 0.0;
  // Number of LP relaxations solved.
  long node_count = 0;
  // Objective of each new incumbent, in the order found.
  std::vector<double> incumbent_history;
  // Optimal basis of the root relaxation.
  Basis root_basis;
};

// Best-bound branch and bound with most-fractional branching.
MilpSolution solve_milp(const MixedBinaryLp& p, const MilpOptions& opt = {});

}  // namespace mpb
