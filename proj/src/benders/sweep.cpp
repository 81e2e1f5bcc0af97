#include <exception>

#include "mpbenders/benders.hpp"

namespace mpb {

Vec copy_values(const ScenarioSubproblemSpec& sub, const Vec& x_master) {
  Vec z(sub.n_z());
  for (int k = 0; k < sub.n_z(); ++k) z[k] = x_master[sub.master_cols[k]];
  return z;
}

std::vector<OracleResult> sweep_serial(const SubproblemOracle& oracle,
                                       const std::vector<ScenarioSubproblemSpec>& subs, const Vec& x_master) {
  std::vector<OracleResult> out(subs.size());
  for (size_t s = 0; s < subs.size(); ++s)
    out[s] = oracle.evaluate(static_cast<int>(s), copy_values(subs[s], x_master));
  return out;
}

std::vector<OracleResult> sweep_parallel(const SubproblemOracle& oracle,
                                         const std::vector<ScenarioSubproblemSpec>& subs, const Vec& x_master) {
  const int n = static_cast<int>(subs.size());
  std::vector<OracleResult> out(n);
  std::vector<std::exception_ptr> err(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int s = 0; s < n; ++s) {
    try {
      out[s] = oracle.evaluate(s, copy_values(subs[s], x_master));
    } catch (...) {
      err[s] = std::current_exception();
    }
  }
  // Report the lowest-index failure, as the serial sweep would.
  for (const auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace mpb
