#include <benchmark/benchmark.h>

#include "monopart/equivalence.hpp"
#include "monopart/valuation.hpp"

using namespace monopart;

namespace {

const PiecewisePoly id = PiecewisePoly::identity(0.0, 1.0);

MonotoneSet sample_set(double lo, double hi, int k) {
  std::vector<Interval> iv{{lo, lo}};
  const double h = (hi - lo) / (2 * k + 1);
  for (int i = 0; i < k; ++i) iv.push_back({lo + h * (2 * i + 1), lo + h * (2 * i + 1.5)});
  iv.push_back({hi, hi});
  return MonotoneSet(iv, lo, hi);
}

}  // namespace

static void BM_LinearDelegation(benchmark::State& state) {
  const Primitive p = make_linear_primitive(id, PiecewisePoly::identity(-1.0, 2.0), id + 0.1, Orientation::Delegation);
  const MonotoneSet s = sample_set(-1.0, 2.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(expected_payoffs(p, s).principal);
}
BENCHMARK(BM_LinearDelegation)->Arg(2)->Arg(8)->Arg(32);

static void BM_LinearPersuasion(benchmark::State& state) {
  const Primitive p = delegation_to_persuasion(
      make_linear_primitive(id, PiecewisePoly::identity(-1.0, 2.0), id + 0.1, Orientation::Delegation));
  const MonotoneSet s = sample_set(-1.0, 2.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(expected_payoffs(p, s).principal);
}
BENCHMARK(BM_LinearPersuasion)->Arg(2)->Arg(8)->Arg(32);

static void BM_Tabulated(benchmark::State& state) {
  const Grid2D du = Grid2D::sample([](double t, double x) { return t - x; });
  const Grid2D dv = Grid2D::sample([](double t, double x) { return t + 0.1 - x; });
  const Primitive p = Primitive::tabulated(du, dv, Orientation::Delegation);
  const MonotoneSet s = sample_set(0.0, 1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(expected_payoffs(p, s).principal);
}
BENCHMARK(BM_Tabulated)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_ExpectedNu(benchmark::State& state) {
  const PiecewisePoly f({0.0, 0.5, 1.0}, {Coeffs{0.0, 4.0}, Coeffs{2.0, -4.0}});
  const NuFunction nu = NuFunction::regulation(f, 2.0);
  const MonotoneSet s = sample_set(0.0, 2.0, static_cast<int>(state.range(0)));
  const PiecewisePoly c = PiecewisePoly::identity(0.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(expected_nu(s, nu, c));
}
BENCHMARK(BM_ExpectedNu)->Arg(2)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
