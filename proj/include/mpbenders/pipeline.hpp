#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpbenders/benders.hpp"
#include "mpbenders/cep.hpp"

namespace mpb {

// Instance config document for the expansion case.
struct InstanceConfig {
  int T = 4;
  int K = 10;
  std::uint64_t seed = 1;
  CutMode cut_mode = CutMode::MultiCut;
  OracleMode oracle_mode = OracleMode::Exact;
  double tol = 1e-6;
  int max_iter = 500;
  double alpha_lower_bound = -1e9;

  // Throws std::invalid_argument.
  void validate() const;
  BendersConfig benders() const;
};

// Missing keys keep their defaults; unknown keys and wrong types raise
// FormatError.
InstanceConfig parse_config(std::istream& in);
InstanceConfig load_config_file(const std::string& path);
void write_config(std::ostream& os, const InstanceConfig& cfg);

struct MpRun {
  Embedding embedding;
  std::shared_ptr<const MpSolution> solution;
  double seconds = 0.0;
};

// Enumerates the shared critical regions of the horizon's subproblem family.
MpRun solve_mp(const cep::CepData& data);
// Reloads a stored solution and checks it matches the horizon's problem.
MpRun load_mp_for(const cep::CepData& data, const std::string& path);

struct RunOutcome {
  InstanceConfig config;
  BendersState state;
  std::vector<TrajectoryRow> trajectory;
  int n_regions = 0;
  double enum_seconds = 0.0;
  double total_seconds = 0.0;
};

// Builds the instance, runs Benders with the configured oracle, and writes
// run_report.json, iterations.csv, timings.csv and trajectory.csv into
// out_dir (plus mp_solution.json when regions were enumerated here).
RunOutcome run_instance(const InstanceConfig& cfg, const std::optional<std::string>& mp_file,
                        const std::string& out_dir);

// Writes mp_solution.json for the config's horizon; returns the region count.
MpRun run_mpsolve(const InstanceConfig& cfg, const std::string& path);

struct BenchRow {
  int T = 0;
  int K = 0;
  CutMode cut_mode = CutMode::MultiCut;
  OracleMode oracle = OracleMode::Exact;
  double objective = 0.0;
  int iterations = 0;
  long evaluations = 0;
  double eval_mean_s = 0.0;
  double eval_total_s = 0.0;
  double enum_s = 0.0;
  // (enumeration + evaluation time) / evaluations
  double amortized_mean_s = 0.0;
};

// One exact and one mp row per (T, K, cut mode) cell.
std::vector<BenchRow> run_bench(const InstanceConfig& base, const std::vector<int>& Ts, const std::vector<int>& Ks,
                                const std::vector<CutMode>& modes);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace mpb
