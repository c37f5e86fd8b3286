#include <benchmark/benchmark.h>

#include "monopart/shape.hpp"
#include "monopart/solver.hpp"

using namespace monopart;

namespace {
const PiecewisePoly tri({0.0, 0.5, 1.0}, {Coeffs{0.0, 4.0}, Coeffs{2.0, -4.0}});
}

static void BM_UpperCensorship(benchmark::State& state) {
  const double theta_bar = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_upper_censorship(tri, theta_bar).theta_star);
}
BENCHMARK(BM_UpperCensorship)->Arg(1)->Arg(2);

static void BM_VerifyOptimal(benchmark::State& state) {
  const RegulationSolution sol = solve_upper_censorship(tri, 1.0);
  const PiecewisePoly c = PiecewisePoly::identity(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(verify_optimal(sol.pi, sol.nu, c).dominance_gap);
}
BENCHMARK(BM_VerifyOptimal);

static void BM_ClassifyAndSolve(benchmark::State& state) {
  const NuFunction nu = NuFunction::regulation(tri, 1.0);
  const PiecewisePoly c = PiecewisePoly::identity(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(classify_and_solve(nu, c).value);
}
BENCHMARK(BM_ClassifyAndSolve);

BENCHMARK_MAIN();
