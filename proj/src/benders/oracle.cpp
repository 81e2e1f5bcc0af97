#include <chrono>
#include <map>
#include <sstream>

#include "mpbenders/benders.hpp"
#include "mpbenders/errors.hpp"

namespace mpb {

namespace {

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string describe(const ScenarioSubproblemSpec& sp, const Vec& theta) {
  std::ostringstream os;
  os.precision(17);
  os << "subproblem '" << sp.id << "' at theta = [";
  for (int i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << theta[i];
  os << "]";
  return os.str();
}

}  // namespace

ExactOracle::ExactOracle(const std::vector<ScenarioSubproblemSpec>& subs) : subs_(&subs) {
  lps_.reserve(subs.size());
  for (const auto& s : subs) lps_.push_back(s.to_lp());
}

OracleResult ExactOracle::evaluate(int sub, const Vec& z) const {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioSubproblemSpec& sp = (*subs_).at(sub);
  if (z.size() != sp.n_z()) throw DimensionMismatch("copy vector length");
  std::map<int, double> fix;
  for (int k = 0; k < sp.n_z(); ++k) fix[sp.n_x() + k] = z[k];
  const LpSolution sol = solve_lp_fixed(lps_[sub], fix);
  if (sol.status != LpStatus::Optimal)
    throw OracleFailure(std::string(to_string(sol.status)) + " " + describe(sp, sp.theta(z)));
  OracleResult r;
  r.value = sol.objective;
  r.subgradient = sol.fixing_duals;
  r.seconds = since(t0);
  return r;
}

MpOracle::MpOracle(std::shared_ptr<const MpSolution> sol, ThetaLayout layout,
                   const std::vector<ScenarioSubproblemSpec>& subs, const SubproblemOracle* fallback)
    : sol_(std::move(sol)), layout_(std::move(layout)), subs_(&subs), fallback_(fallback) {
  for (const auto& s : subs)
    if (s.n_z() + s.cost_values.size() + s.rhs_values.size() != static_cast<Eigen::Index>(sol_->theta_dim))
      throw DimensionMismatch("subproblem '" + s.id + "' does not match the mp solution's parameter space");
}

OracleResult MpOracle::evaluate(int sub, const Vec& z) const {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioSubproblemSpec& sp = (*subs_).at(sub);
  const Vec th = sp.theta(z);
  const std::optional<int> r = try_locate_region(*sol_, th);
  if (!r) {
    if (fallback_) return fallback_->evaluate(sub, z);
    throw NoRegionFound(describe(sp, th));
  }
  const CriticalRegion& cr = sol_->regions[*r];
  OracleResult out;
  out.value = evaluate_value(cr, sol_->problem, th);
  out.subgradient = subgradient_wrt_master(cr, layout_, sol_->problem, th);
  out.region = *r;
  out.seconds = since(t0);
  return out;
}

}  // namespace mpb
