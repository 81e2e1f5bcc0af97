#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mpbenders/graph.hpp"
#include "mpbenders/mplp.hpp"

namespace mpb::cep {

inline constexpr int kProcesses = 3;
inline constexpr int kChemicals = 3;
inline constexpr int kUncertain = 6;

// Mean data of the three-process, three-chemical expansion network.
// Per-period matrices are indexed (process or chemical, period).
struct CepData {
  int T = 4;
  Mat alpha;  // expansion cost per unit
  Mat beta;   // fixed expansion charge
  Mat sigma;  // operating cost per unit of production
  Mat avail;  // purchase availability A_jt
  Mat demand; // sales demand D_jt
  Mat gamma;  // sales price
  Mat phi;    // purchase price
  Vec EL;
  Vec EU;
  Vec QU;
  Mat eta;  // consumption, (chemical, process)
  Mat mu;   // production, (chemical, process)
};

// Table values for t <= 4; later periods grow geometrically with each
// entry's own period-3-to-4 ratio.
CepData default_data(int T);

// The six uncertain market quantities, in sampling order.
enum class Slot { Avail1, Avail2, Demand3, Gamma3, Phi1, Phi2 };
const char* slot_name(Slot s);
double slot_mean(const CepData& d, Slot s, int t);

struct ScenarioSet {
  int K = 0;
  int T = 0;
  std::vector<double> pi;
  // values[(k * T + t) * kUncertain + slot]
  std::vector<double> values;

  double at(int k, int t, Slot s) const {
    return values[(static_cast<size_t>(k) * T + t) * kUncertain + static_cast<int>(s)];
  }
};

// Draws every uncertain slot from Normal(mean, 0.1 * mean), resampling
// negatives (at most 100 tries, then 0). Loop order is scenario, period, slot.
ScenarioSet sample_scenarios(const CepData& d, int K, std::uint64_t seed);

// Parameter range of an uncertain or cost slot over all periods:
// [max(0, min_t 0.5 m_t), max_t 1.5 m_t].
std::pair<double, double> slot_range(const Mat& means_row_by_t);

// Master subgraph "master" with one node per period; one single-node
// subgraph per (scenario, period), scenario-major.
ModelGraph build_graph(const CepData& d, const ScenarioSet& s);

// Subproblem for (k, t) coupled to the three cumulative capacities of
// period t. Its master columns index a one-period master (x, y, q per
// process, process-major).
ScenarioSubproblemSpec build_subproblem_spec(const CepData& d, const ScenarioSet& s, int k, int t);

// Shared parametric subproblem: theta = [q(3); gamma3, sigma(3), phi1, phi2;
// A1, A2, D3].
Embedding build_mp_embedding(const CepData& d);

}  // namespace mpb::cep
