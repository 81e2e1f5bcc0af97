#include "mpbenders/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <omp.h>

#include "json.hpp"
#include "mpbenders/errors.hpp"
#include "mpbenders/mp_io.hpp"

namespace mpb {

namespace {

using nlohmann::json;

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("$.") + key, e.what());
  }
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write " + p.string());
  return f;
}

json config_json(const InstanceConfig& c) {
  return json{{"T", c.T},
              {"K", c.K},
              {"seed", c.seed},
              {"cut_mode", to_string(c.cut_mode)},
              {"oracle_mode", to_string(c.oracle_mode)},
              {"tol", c.tol},
              {"max_iter", c.max_iter},
              {"alpha_lower_bound", c.alpha_lower_bound}};
}

// The parametric problem depends on the horizon only through its parameter
// ranges; compare it entry by entry.
bool same_problem(const MpLp& a, const MpLp& b) {
  return a.c == b.c && a.H == b.H && a.A == b.A && a.b == b.b && a.F == b.F && a.A_eq == b.A_eq &&
         a.b_eq == b.b_eq && a.F_eq == b.F_eq && a.A_theta == b.A_theta && a.b_theta == b.b_theta;
}

}  // namespace

void InstanceConfig::validate() const {
  if (T < 1) throw std::invalid_argument("T must be at least 1");
  if (K < 1) throw std::invalid_argument("K must be at least 1");
  benders().validate();
}

BendersConfig InstanceConfig::benders() const {
  BendersConfig b;
  b.cut_mode = cut_mode;
  b.oracle_mode = oracle_mode;
  b.tol = tol;
  b.max_iter = max_iter;
  b.alpha_lower_bound = alpha_lower_bound;
  return b;
}

InstanceConfig parse_config(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("$", e.what());
  }
  if (!j.is_object()) throw FormatError("$", "expected an object");
  InstanceConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "T") c.T = field<int>(j, "T");
    else if (k == "K") c.K = field<int>(j, "K");
    else if (k == "seed") c.seed = field<std::uint64_t>(j, "seed");
    else if (k == "tol") c.tol = field<double>(j, "tol");
    else if (k == "max_iter") c.max_iter = field<int>(j, "max_iter");
    else if (k == "alpha_lower_bound") c.alpha_lower_bound = field<double>(j, "alpha_lower_bound");
    else if (k == "cut_mode" || k == "oracle_mode") {
      const auto s = field<std::string>(j, k.c_str());
      try {
        if (k == "cut_mode") c.cut_mode = parse_cut_mode(s);
        else c.oracle_mode = parse_oracle_mode(s);
      } catch (const std::invalid_argument& e) {
        throw FormatError("$." + k, e.what());
      }
    } else {
      throw FormatError("$." + k, "unknown key");
    }
  }
  return c;
}

InstanceConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read " + path);
  return parse_config(f);
}

void write_config(std::ostream& os, const InstanceConfig& cfg) { os << config_json(cfg).dump(2) << '\n'; }

MpRun solve_mp(const cep::CepData& data) {
  MpRun r{cep::build_mp_embedding(data), nullptr, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  r.solution = std::make_shared<const MpSolution>(enumerate_regions(r.embedding.problem));
  r.seconds = since(t0);
  return r;
}

MpRun load_mp_for(const cep::CepData& data, const std::string& path) {
  MpRun r{cep::build_mp_embedding(data), nullptr, 0.0};
  auto sol = std::make_shared<MpSolution>(load_mp_file(path));
  if (!same_problem(sol->problem, r.embedding.problem))
    throw FormatError("$.problem", "stored problem does not match horizon T=" + std::to_string(data.T));
  r.solution = std::move(sol);
  return r;
}

MpRun run_mpsolve(const InstanceConfig& cfg, const std::string& path) {
  cfg.validate();
  MpRun r = solve_mp(cep::default_data(cfg.T));
  save_mp_file(*r.solution, path);
  return r;
}

RunOutcome run_instance(const InstanceConfig& cfg, const std::optional<std::string>& mp_file,
                        const std::string& out_dir) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  const cep::CepData data = cep::default_data(cfg.T);
  const BendersPartition part = extract_benders_partition(cep::build_graph(data, cep::sample_scenarios(data, cfg.K, cfg.seed)));
  const ExactOracle exact(part.subs);

  RunOutcome out;
  out.config = cfg;
  std::unique_ptr<MpOracle> mp;
  if (cfg.oracle_mode != OracleMode::Exact) {
    MpRun m;
    if (mp_file && fs::exists(*mp_file)) {
      m = load_mp_for(data, *mp_file);
    } else {
      m = solve_mp(data);
      save_mp_file(*m.solution, (dir / "mp_solution.json").string());
    }
    out.enum_seconds = m.seconds;
    out.n_regions = static_cast<int>(m.solution->regions.size());
    mp = std::make_unique<MpOracle>(m.solution, m.embedding.layout, part.subs,
                                    cfg.oracle_mode == OracleMode::MpWithExactFallback ? &exact : nullptr);
  }
  const SubproblemOracle& oracle = mp ? static_cast<const SubproblemOracle&>(*mp) : exact;
  out.state = run(part, cfg.benders(), oracle);
  out.trajectory = record_trajectory(out.state, part.subs);
  out.total_seconds = since(t0);

  {
    auto f = open_out(dir / "iterations.csv");
    write_iterations_csv(f, out.state);
  }
  {
    auto f = open_out(dir / "timings.csv");
    write_timings_csv(f, out.state);
  }
  {
    auto f = open_out(dir / "trajectory.csv");
    write_trajectory_csv(f, out.trajectory);
  }

  const BendersState& st = out.state;
  double master_t = 0.0, sub_t = 0.0;
  for (const auto& r : st.log) {
    master_t += r.master_time;
    sub_t += r.sub_time;
  }
  json result{{"converged", st.converged},
              {"objective", st.converged ? json(st.UB) : json(nullptr)},
              {"iterations", st.iteration},
              {"lower_bound", st.LB},
              {"upper_bound", st.UB},
              {"rel_gap", st.rel_gap()},
              {"cuts", st.cuts.size()},
              {"evaluations", st.evaluations},
              {"regions", out.n_regions}};
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json meta{{"timestamp", stamp},
            {"threads", omp_get_max_threads()},
            {"total_time_s", out.total_seconds},
            {"master_time_s", master_t},
            {"subproblem_time_s", sub_t},
            {"enumeration_time_s", out.enum_seconds},
            {"eval_mean_s", st.evaluations ? st.eval_seconds / st.evaluations : 0.0}};
  json report{{"config", config_json(cfg)},
               {"result", result},
               {"files",
                {{"iterations", "iterations.csv"},
                 {"timings", "timings.csv"},
                 {"trajectory", "trajectory.csv"}}},
               {"metadata", meta}};
  auto f = open_out(dir / "run_report.json");
  f << report.dump(2) << '\n';
  return out;
}

std::vector<BenchRow> run_bench(const InstanceConfig& base, const std::vector<int>& Ts, const std::vector<int>& Ks,
                                const std::vector<CutMode>& modes) {
  std::vector<BenchRow> rows;
  for (int T : Ts) {
    const cep::CepData data = cep::default_data(T);
    const MpRun m = solve_mp(data);
    for (int K : Ks) {
      const BendersPartition part =
          extract_benders_partition(cep::build_graph(data, cep::sample_scenarios(data, K, base.seed)));
      const ExactOracle exact(part.subs);
      const MpOracle mp(m.solution, m.embedding.layout, part.subs, &exact);
      for (CutMode cm : modes)
        for (OracleMode om : {OracleMode::Exact, OracleMode::MpWithExactFallback}) {
          InstanceConfig c = base;
          c.T = T;
          c.K = K;
          c.cut_mode = cm;
          c.oracle_mode = om;
          c.validate();
          const BendersState st = run(part, c.benders(), om == OracleMode::Exact ? static_cast<const SubproblemOracle&>(exact) : mp);
          BenchRow r;
          r.T = T;
          r.K = K;
          r.cut_mode = cm;
          r.oracle = om;
          r.objective = st.UB;
          r.iterations = st.iteration;
          r.evaluations = st.evaluations;
          r.eval_total_s = st.eval_seconds;
          r.eval_mean_s = st.evaluations ? st.eval_seconds / st.evaluations : 0.0;
          r.enum_s = om == OracleMode::Exact ? 0.0 : m.seconds;
          r.amortized_mean_s = st.evaluations ? (st.eval_seconds + r.enum_s) / st.evaluations : 0.0;
          rows.push_back(r);
        }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "T,K,cut_mode,oracle,objective,iterations,evaluations,eval_mean_s,eval_total_s,enum_s,amortized_mean_s\n";
  for (const auto& r : rows)
    os << r.T << ',' << r.K << ',' << to_string(r.cut_mode) << ',' << to_string(r.oracle) << ',' << fmt(r.objective)
       << ',' << r.iterations << ',' << r.evaluations << ',' << fmt(r.eval_mean_s) << ',' << fmt(r.eval_total_s) << ','
       << fmt(r.enum_s) << ',' << fmt(r.amortized_mean_s) << '\n';
}

}  // namespace mpb
