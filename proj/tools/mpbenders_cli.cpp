// Command-line driver for the capacity-expansion benchmark.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mpbenders/errors.hpp"
#include "mpbenders/pipeline.hpp"

namespace {

enum Exit { kConverged = 0, kGapOpen = 2, kInputError = 3, kNumerical = 4 };

struct Flags {
  std::string config_file;
  std::optional<int> T, K, max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> cuts, oracle;
  std::optional<double> tol, alpha_lb;
  std::string mp_file;
  std::string out_dir = "out";
};

void add_instance_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_file, "Instance config JSON; flags override its fields")->check(CLI::ExistingFile);
  app->add_option("--horizon", f.T, "Number of periods T");
  app->add_option("--scenarios", f.K, "Number of scenarios K");
  app->add_option("--seed", f.seed, "Scenario sampling seed");
  app->add_option("--cuts", f.cuts, "Cut mode")->check(CLI::IsMember({"multi", "single"}));
  app->add_option("--oracle", f.oracle, "Subproblem oracle")->check(CLI::IsMember({"exact", "mp", "mp-fallback"}));
  app->add_option("--tol", f.tol, "Relative gap tolerance");
  app->add_option("--max-iter", f.max_iter, "Iteration limit");
  app->add_option("--alpha-lb", f.alpha_lb, "Lower bound on recourse estimates");
  app->add_option("--mp-file", f.mp_file, "Stored mp solution");
  app->add_option("--out-dir", f.out_dir, "Output directory");
}

mpb::InstanceConfig resolve(const Flags& f) {
  mpb::InstanceConfig c = f.config_file.empty() ? mpb::InstanceConfig{} : mpb::load_config_file(f.config_file);
  if (f.T) c.T = *f.T;
  if (f.K) c.K = *f.K;
  if (f.seed) c.seed = *f.seed;
  if (f.cuts) c.cut_mode = mpb::parse_cut_mode(*f.cuts);
  if (f.oracle) c.oracle_mode = mpb::parse_oracle_mode(*f.oracle);
  if (f.tol) c.tol = *f.tol;
  if (f.max_iter) c.max_iter = *f.max_iter;
  if (f.alpha_lb) c.alpha_lower_bound = *f.alpha_lb;
  c.validate();
  return c;
}

int cmd_mpsolve(const Flags& f) {
  const mpb::InstanceConfig c = resolve(f);
  std::filesystem::create_directories(f.out_dir);
  const std::string path = f.mp_file.empty() ? (std::filesystem::path(f.out_dir) / "mp_solution.json").string() : f.mp_file;
  const mpb::MpRun r = mpb::run_mpsolve(c, path);
  std::printf("regions %zu\nenumeration_time_s %.6f\nwrote %s\n", r.solution->regions.size(), r.seconds, path.c_str());
  return kConverged;
}

int cmd_benders(const Flags& f) {
  const mpb::InstanceConfig c = resolve(f);
  std::optional<std::string> mp;
  if (!f.mp_file.empty()) mp = f.mp_file;
  const mpb::RunOutcome out = mpb::run_instance(c, mp, f.out_dir);
  const auto& st = out.state;
  std::printf("%s after %d iterations: LB %.10g UB %.10g gap %.3g\n", st.converged ? "converged" : "not converged",
              st.iteration, st.LB, st.UB, st.rel_gap());
  std::printf("wrote %s\n", (std::filesystem::path(f.out_dir) / "run_report.json").string().c_str());
  return st.converged ? kConverged : kGapOpen;
}

int cmd_bench(const Flags& f, const std::vector<int>& Ts, const std::vector<int>& Ks,
              const std::vector<std::string>& modes) {
  const mpb::InstanceConfig c = resolve(f);
  std::vector<mpb::CutMode> cm;
  for (const auto& m : modes) cm.push_back(mpb::parse_cut_mode(m));
  const auto rows = mpb::run_bench(c, Ts, Ks, cm);
  std::filesystem::create_directories(f.out_dir);
  const auto path = std::filesystem::path(f.out_dir) / "bench.csv";
  std::ofstream out(path);
  mpb::write_bench_csv(out, rows);
  mpb::write_bench_csv(std::cout, rows);
  return kConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benders decomposition with exact or multiparametric subproblem oracles"};
  app.require_subcommand(1);
  Flags f;
  std::vector<int> Ts{4}, Ks{50, 200};
  std::vector<std::string> modes{"multi", "single"};

  auto* mpsolve = app.add_subcommand("mpsolve", "Enumerate and store the critical regions of the subproblem family");
  add_instance_flags(mpsolve, f);
  auto* benders = app.add_subcommand("benders", "Run Benders decomposition on one instance");
  add_instance_flags(benders, f);
  auto* bench = app.add_subcommand("bench", "Compare exact and mp oracles over a grid");
  add_instance_flags(bench, f);
  bench->add_option("--grid-horizon", Ts, "Horizons to run")->delimiter(',');
  bench->add_option("--grid-scenarios", Ks, "Scenario counts to run")->delimiter(',');
  bench->add_option("--grid-cuts", modes, "Cut modes to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (*mpsolve) return cmd_mpsolve(f);
    if (*benders) return cmd_benders(f);
    return cmd_bench(f, Ts, Ks, modes);
  } catch (const mpb::FormatError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInputError;
  } catch (const mpb::DimensionMismatch& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInputError;
  } catch (const mpb::Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumerical;
  }
}
