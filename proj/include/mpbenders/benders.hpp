#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpbenders/graph.hpp"
#include "mpbenders/milp.hpp"
#include "mpbenders/mplp.hpp"

namespace mpb {

enum class CutMode { MultiCut, SingleCut };
enum class OracleMode { Exact, MpSurrogate, MpWithExactFallback };

const char* to_string(CutMode m);
const char* to_string(OracleMode m);
CutMode parse_cut_mode(const std::string& s);        // "multi" | "single"
OracleMode parse_oracle_mode(const std::string& s);  // "exact" | "mp" | "mp-fallback"

// alpha >= intercept + coeffs^T (x[cols] - anchor). `sub` is the
// subproblem index, or -1 for an aggregated cut.
struct Cut {
  int sub = -1;
  double intercept = 0.0;
  std::vector<int> cols;
  Vec coeffs;
  Vec anchor;
  int iteration = 0;

  double eval(const Vec& x_master) const;
};

struct OracleResult {
  double value = 0.0;
  // Subgradient over the subproblem's copy variables.
  Vec subgradient;
  std::optional<int> region;
  // Seconds spent inside the evaluation.
  double seconds = 0.0;
};

// Value and supporting hyperplane of one subproblem at fixed copy values.
// Implementations must be safe to call concurrently.
class SubproblemOracle {
 public:
  virtual ~SubproblemOracle() = default;
  virtual OracleResult evaluate(int sub, const Vec& z) const = 0;
};

// Solves the subproblem LP with the copy variables fixed.
class ExactOracle : public SubproblemOracle {
 public:
  explicit ExactOracle(const std::vector<ScenarioSubproblemSpec>& subs);
  OracleResult evaluate(int sub, const Vec& z) const override;

 private:
  const std::vector<ScenarioSubproblemSpec>* subs_;
  std::vector<StandardLp> lps_;
};

// Looks up the critical region of theta = [z; slot values] in a stored
// mp solution. With a fallback oracle, parameters outside every region are
// solved exactly instead of raising NoRegionFound.
class MpOracle : public SubproblemOracle {
 public:
  MpOracle(std::shared_ptr<const MpSolution> sol, ThetaLayout layout,
           const std::vector<ScenarioSubproblemSpec>& subs, const SubproblemOracle* fallback = nullptr);
  OracleResult evaluate(int sub, const Vec& z) const override;
  const MpSolution& solution() const { return *sol_; }

 private:
  std::shared_ptr<const MpSolution> sol_;
  ThetaLayout layout_;
  const std::vector<ScenarioSubproblemSpec>* subs_;
  const SubproblemOracle* fallback_;
};

struct BendersConfig {
  CutMode cut_mode = CutMode::MultiCut;
  OracleMode oracle_mode = OracleMode::Exact;
  double tol = 1e-6;
  int max_iter = 500;
  double alpha_lower_bound = -1e9;
  // Evaluate subproblems with the OpenMP sweep.
  bool parallel = true;
  MilpOptions milp;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double LB = 0.0;
  double UB = 0.0;
  double rel_gap = 0.0;
  // Optimal value of this iteration's master.
  double master_objective = 0.0;
  double master_time = 0.0;
  double sub_time = 0.0;
  int cuts_added = 0;
  // Master iterate this iteration's subproblems were evaluated at.
  Vec x_master;
  std::vector<std::optional<int>> regions;
};

struct BendersState {
  int iteration = 0;
  double LB = -kInf;
  double UB = kInf;
  bool converged = false;
  Vec incumbent;
  std::vector<double> sub_values;
  std::vector<Cut> cuts;
  std::vector<IterationRecord> log;
  // Accumulated oracle time and evaluation count.
  double eval_seconds = 0.0;
  long evaluations = 0;

  double rel_gap() const;
};

// Evaluates every subproblem at the master iterate. Results are stored by
// subproblem index; the parallel version is bit-identical to the serial one.
std::vector<OracleResult> sweep_serial(const SubproblemOracle& oracle,
                                       const std::vector<ScenarioSubproblemSpec>& subs, const Vec& x_master);
std::vector<OracleResult> sweep_parallel(const SubproblemOracle& oracle,
                                         const std::vector<ScenarioSubproblemSpec>& subs, const Vec& x_master);

// Copy-variable values of one subproblem at a master iterate.
Vec copy_values(const ScenarioSubproblemSpec& sub, const Vec& x_master);

// Master with alpha columns appended after the partition's columns: one per
// subproblem (MultiCut) or a single one (SingleCut), each bounded below by
// cfg.alpha_lower_bound.
MixedBinaryLp build_master_with_cuts(const BendersPartition& part, const std::vector<Cut>& cuts,
                                     const BendersConfig& cfg);

// Throws MasterInfeasible, OracleFailure, or NoRegionFound (from the oracle).
BendersState run(const BendersPartition& part, const BendersConfig& cfg, const SubproblemOracle& oracle);
BendersState run(const ModelGraph& g, const BendersConfig& cfg, const SubproblemOracle& oracle);

struct TrajectoryRow {
  int iter = 0;
  int scenario = -1;
  int period = -1;
  std::optional<int> region;
};

std::vector<TrajectoryRow> record_trajectory(const BendersState& state,
                                             const std::vector<ScenarioSubproblemSpec>& subs);

// iter,LB,UB,rel_gap,cuts_added
void write_iterations_csv(std::ostream& os, const BendersState& state);
// iter,master_time_s,sub_time_s
void write_timings_csv(std::ostream& os, const BendersState& state);
// iter,scenario,period,region_id (empty when exact)
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows);

}  // namespace mpb
