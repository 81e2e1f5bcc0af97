// Serial vs OpenMP subproblem sweep on one master iterate, for both oracles.
#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "mpbenders/benders.hpp"
#include "mpbenders/cep.hpp"
#include "mpbenders/pipeline.hpp"

namespace {

struct Fixture {
  mpb::BendersPartition part;
  mpb::MpRun mp;
  std::unique_ptr<mpb::ExactOracle> exact;
  std::unique_ptr<mpb::MpOracle> lookup;
  mpb::Vec x;

  explicit Fixture(int K) {
    const auto d = mpb::cep::default_data(4);
    part = mpb::extract_benders_partition(mpb::cep::build_graph(d, mpb::cep::sample_scenarios(d, K, 1)));
    mp = mpb::solve_mp(d);
    exact = std::make_unique<mpb::ExactOracle>(part.subs);
    lookup = std::make_unique<mpb::MpOracle>(mp.solution, mp.embedding.layout, part.subs, exact.get());
    // Capacities spread over the feasible range.
    x = mpb::Vec::Zero(part.master.base.num_vars());
    for (int j = 0; j < x.size(); ++j) x[j] = 7.0 + 13.0 * (j % 7);
  }
};

const Fixture& fixture(int K) {
  static std::map<int, std::unique_ptr<Fixture>> cache;
  auto& f = cache[K];
  if (!f) f = std::make_unique<Fixture>(K);
  return *f;
}

template <bool Parallel, bool Mp>
void BM_Sweep(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const mpb::SubproblemOracle& o = Mp ? static_cast<const mpb::SubproblemOracle&>(*f.lookup) : *f.exact;
  for (auto _ : state) {
    auto r = Parallel ? mpb::sweep_parallel(o, f.part.subs, f.x) : mpb::sweep_serial(o, f.part.subs, f.x);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.part.subs.size()));
}

BENCHMARK_TEMPLATE(BM_Sweep, false, false)->Name("exact/serial")->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Sweep, true, false)->Name("exact/openmp")->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Sweep, false, true)->Name("mp/serial")->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Sweep, true, true)->Name("mp/openmp")->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
