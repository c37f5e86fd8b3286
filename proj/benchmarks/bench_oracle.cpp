#include <benchmark/benchmark.h>

#include "monopart/oracle.hpp"
#include "monopart/scenario.hpp"

using namespace monopart;

static void BM_NuOracle(benchmark::State& state) {
  const PiecewisePoly f({0.0, 0.5, 1.0}, {Coeffs{0.0, 4.0}, Coeffs{2.0, -4.0}});
  const NuFunction nu = NuFunction::regulation(f, 1.0);
  OracleOptions opt;
  opt.n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_optimum(nu, PiecewisePoly::identity(0.0, 1.0), opt).value);
  state.counters["candidates"] = static_cast<double>(candidate_count(opt.n));
}
BENCHMARK(BM_NuOracle)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

static void BM_DelegationOracle(benchmark::State& state) {
  const Primitive p = builtin_scenario("kg").primitive();
  OracleOptions opt;
  opt.n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_optimum(p, OracleMode::Delegation, opt).value);
}
BENCHMARK(BM_DelegationOracle)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Battery(benchmark::State& state) {
  const PiecewisePoly id = PiecewisePoly::identity(0.0, 1.0);
  const Primitive pD = make_linear_primitive(id, PiecewisePoly::identity(-1.0, 2.0), id + 0.1, Orientation::Delegation);
  for (auto _ : state) benchmark::DoNotOptimize(equivalence_battery(pD, 100, 1, 16).max_gap_principal);
}
BENCHMARK(BM_Battery)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
