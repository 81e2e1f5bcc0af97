#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpbenders/linalg.hpp"
#include "mpbenders/lp.hpp"

namespace mpb {

// min (c + H t)' x  s.t.  A x <= b + F t,  A_eq x = b_eq + F_eq t,  t in Theta,
// Theta = {t : A_theta t <= b_theta}. x is otherwise unrestricted.
struct MpLp {
  Vec c;
  Mat H;
  Mat A;
  Vec b;
  Mat F;
  Mat A_eq;
  Vec b_eq;
  Mat F_eq;
  Mat A_theta;
  Vec b_theta;

  int x_dim() const { return static_cast<int>(c.size()); }
  int theta_dim() const { return static_cast<int>(H.cols()); }
  int num_ineq() const { return static_cast<int>(b.size()); }
  int num_eq() const { return static_cast<int>(b_eq.size()); }

  // Throws DimensionMismatch on inconsistent shapes.
  void validate() const;
  // The LP obtained by fixing the parameter.
  StandardLp at(const Vec& theta) const;
};

struct CriticalRegion {
  Mat E;
  Vec f;
  Mat A_aff;
  Vec b_aff;
  // Dual map over the active rows: active inequality rows in active_set
  // order, followed by every equality row.
  Mat G;
  Vec g;
  std::vector<int> active_set;
  Vec cheb_center;
  double cheb_radius = 0.0;
  // Lookup prefilter; not serialized.
  Vec box_lo;
  Vec box_hi;

  bool contains(const Vec& theta, double tol = 1e-8) const;
};

struct MpSolution {
  MpLp problem;
  std::vector<CriticalRegion> regions;
  int theta_dim = 0;
  int x_dim = 0;
};

// Index sets of the parameter vector when a scenario subproblem is embedded.
struct ThetaLayout {
  std::vector<int> master_idx;
  std::vector<int> cost_idx;
  std::vector<int> rhs_idx;
};

// Scenario subproblem in coupled form:
//   min c_x' x + sum_s scale_s * theta_s * x[var_s]
//   s.t. A x + C z <= q + (rhs slots),  A_eq x + C_eq z = q_eq + (rhs slots),
//        lb <= x <= ub,  z = master values.
struct CostSlot {
  int var = 0;
  double scale = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string name;
};

struct RhsSlot {
  int row = 0;
  bool eq = false;
  double scale = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string name;
};

struct ScenarioSubproblemSpec {
  std::string id;
  int scenario = -1;
  int period = -1;
  double weight = 1.0;

  Vec c_x;
  Vec lb;
  Vec ub;
  std::vector<std::string> x_names;
  Mat A;
  Mat C;
  Vec q;
  Mat A_eq;
  Mat C_eq;
  Vec q_eq;
  // Parameter-set bounds on each copy variable.
  Vec z_lo;
  Vec z_hi;
  // master_cols[k] is the master column that copy variable k mirrors.
  std::vector<int> master_cols;

  std::vector<CostSlot> cost_slots;
  std::vector<RhsSlot> rhs_slots;
  // Realized slot values for this scenario.
  Vec cost_values;
  Vec rhs_values;

  int n_x() const { return static_cast<int>(c_x.size()); }
  int n_z() const { return static_cast<int>(master_cols.size()); }
  void validate() const;
  // Deterministic LP over (x, z) at the realized slot values; z is free.
  StandardLp to_lp() const;
  // Parameter vector [z; cost values; rhs values].
  Vec theta(const Vec& z) const;
};

struct Embedding {
  MpLp problem;
  ThetaLayout layout;
  // For each mp-LP x column, the subproblem column (x then z) it came from.
  std::vector<int> source_col;
};

// Builds the mp-LP whose parameter vector is [z; cost slots; rhs slots].
// Variables fixed at zero are eliminated; bounds become inequality rows.
Embedding embed_subproblem(const ScenarioSubproblemSpec& sub);

enum class EnumerationMethod { Auto, Explore, Combinatorial };

struct EnumerationOptions {
  EnumerationMethod method = EnumerationMethod::Auto;
  double step = 1e-6;
  int coverage_samples = 2000;
  std::uint64_t seed = 0x5eed;
  double min_radius = 1e-8;
  // Auto enumerates every candidate active set when the problem has at most
  // this many inequality rows, and walks facets otherwise.
  int combinatorial_limit = 12;
};

MpSolution enumerate_regions(const MpLp& p, const EnumerationOptions& opt = {});

// Recomputes the lookup prefilter boxes of every region.
void compute_region_boxes(MpSolution& sol);

// Smallest region index containing theta (tolerance 1e-8). Throws NoRegionFound.
int locate_region(const MpSolution& sol, const Vec& theta);
// Same without throwing.
std::optional<int> try_locate_region(const MpSolution& sol, const Vec& theta);

Vec evaluate_primal(const CriticalRegion& r, const Vec& theta);
double evaluate_value(const CriticalRegion& r, const MpLp& p, const Vec& theta);
Vec evaluate_duals(const CriticalRegion& r, const Vec& theta);
Vec subgradient_wrt_master(const CriticalRegion& r, const ThetaLayout& layout, const MpLp& p,
                           const Vec& theta);

// Active-set signature of the optimal basis at theta, or nullopt when the LP
// is infeasible or unbounded there.
std::optional<std::vector<int>> optimal_active_set(const MpLp& p, const Vec& theta);

}  // namespace mpb
