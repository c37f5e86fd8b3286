#include <doctest.h>

#include <cmath>

#include "monopart/equivalence.hpp"
#include "monopart/error.hpp"
#include "monopart/oracle.hpp"
#include "monopart/scenario.hpp"
#include "support.hpp"

using namespace monopart;
using doctest::Approx;
namespace ts = testsupport;

namespace {

const PiecewisePoly id = PiecewisePoly::identity(0.0, 1.0);

// Node subsets times a separated/pooled flag for every cell whose ends are both in.
std::uint64_t count_by_hand(std::size_t n) {
  std::uint64_t total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    auto in = [&](std::size_t i) { return i == 0 || i == n || ((mask >> (i - 1)) & 1u); };
    std::size_t free_cells = 0;
    for (std::size_t i = 0; i < n; ++i) free_cells += in(i) && in(i + 1);
    total += std::uint64_t{1} << free_cells;
  }
  return total;
}

// Best layout on a uniform grid of [lo, hi]: cuts at grid nodes, blocks
// pooled, single-cell blocks optionally separated.
double grid_optimum(const std::function<double(double)>& nu, double lo, double hi, std::size_t n) {
  double best = -INFINITY;
  const double h = (hi - lo) / static_cast<double>(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    std::vector<double> z{lo};
    std::vector<std::size_t> idx{0};
    for (std::size_t i = 1; i < n; ++i)
      if ((mask >> (i - 1)) & 1u) {
        z.push_back(lo + h * static_cast<double>(i));
        idx.push_back(i);
      }
    z.push_back(hi);
    idx.push_back(n);
    std::vector<std::size_t> single;
    for (std::size_t j = 0; j + 1 < idx.size(); ++j)
      if (idx[j + 1] == idx[j] + 1) single.push_back(j);
    for (std::uint64_t sep = 0; sep < (std::uint64_t{1} << single.size()); ++sep) {
      std::vector<bool> pooled(z.size() - 1, true);
      for (std::size_t k = 0; k < single.size(); ++k)
        if ((sep >> k) & 1u) pooled[single[k]] = false;
      best = std::max(best, ts::layout_value(nu, z, pooled, 40));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("candidate count agrees with a direct count") {
  for (std::size_t n = 1; n <= 12; ++n) CHECK(candidate_count(n) == count_by_hand(n));
}

TEST_CASE("grids beyond the cap are refused") {
  const NuFunction nu = NuFunction::direct(PiecewisePoly::from_global(std::vector<double>{0.0, 0.0, 1.0}, 0.0, 1.0));
  OracleOptions opt;
  opt.n = 18;
  try {
    enumerate_optimum(nu, id, opt);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooManyCells);
  }
}

TEST_CASE("codes decode to sets on the grid") {
  const std::vector<double> grid = snapped_grid(0.0, 1.0, 4, std::vector<double>{0.3});
  REQUIRE(grid.size() == 5);
  CHECK(grid[1] == 0.3);
  CHECK(grid[2] == 0.5);
  // Nodes 1 and 2 in, cell [g1, g2] separated.
  const MonotoneSet s = decode(GridCode{0b011u, 0b0010u}, grid);
  CHECK(s == MonotoneSet({{0.0, 0.0}, {0.3, 0.5}, {1.0, 1.0}}));
  CHECK(decode(GridCode{0u, 0u}, grid) == MonotoneSet::endpoints());
}

TEST_CASE("nu oracle matches a hand enumeration of layouts") {
  const PiecewisePoly c = PiecewisePoly::identity(-0.5, 1.5);
  for (const NuFunction& nu :
       {NuFunction::direct(PiecewisePoly::from_global(std::vector<double>{0.0, 0.1, 0.6, -0.5}, -0.5, 1.5)),
        NuFunction::regulation(ts::triangular().poly, 1.5)}) {
    const PiecewisePoly cc = nu.lo() == 0.0 ? PiecewisePoly::identity(0.0, 1.5) : c;
    OracleOptions opt;
    opt.n = 7;
    const OracleResult r = enumerate_optimum(nu, cc, opt);
    const double want = grid_optimum([&](double m) { return nu(m); }, cc.lo(), cc.hi(), 7);
    CHECK(r.value == Approx(want).epsilon(1e-9));
    CHECK(r.evaluated == candidate_count(7));
  }
}

TEST_CASE("top-k sets are ranked") {
  const NuFunction nu = NuFunction::regulation(ts::triangular().poly, 1.0);
  OracleOptions opt;
  opt.n = 8;
  opt.top_k = 6;
  const OracleResult r = enumerate_optimum(nu, id, opt);
  REQUIRE(r.top.size() == 6);
  CHECK(r.top[0].value == r.value);
  CHECK(r.top[0].code == r.code);
  for (std::size_t i = 1; i < r.top.size(); ++i) CHECK(r.top[i].value <= r.top[i - 1].value);
}

TEST_CASE("aligned persuasion reveals everything") {
  const Primitive p = make_linear_primitive(id, id, id, Orientation::Persuasion);
  OracleOptions opt;
  opt.n = 8;
  const OracleResult r = enumerate_optimum(p, OracleMode::Persuasion, opt);
  CHECK(r.best == MonotoneSet::full());
  // E[t^2] / 2 with levels vanishing at decision 0.
  CHECK(r.value == Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("delegation and persuasion searches reach the same value") {
  const Primitive pD = make_linear_primitive(id, id, id * 1.6 + 0.05, Orientation::Delegation);
  OracleOptions opt;
  opt.n = 7;
  const OracleResult d = enumerate_optimum(pD, OracleMode::Delegation, opt);
  const OracleResult q = enumerate_optimum(delegation_to_persuasion(pD), OracleMode::Persuasion, opt);
  CHECK(d.value == Approx(q.value).epsilon(1e-9));
  CHECK(d.code == q.code);
}

TEST_CASE("KG: two extreme decisions and one in between") {
  const Scenario s = builtin_scenario("kg");
  OracleOptions opt;
  opt.n = 10;
  const OracleResult r = enumerate_optimum(s.primitive(), OracleMode::Delegation, opt);
  CHECK(r.best == MonotoneSet::points({0.0, 0.4, 1.0}));
}

TEST_CASE("equivalence battery is deterministic and catches a mismatch") {
  const Primitive pD = make_linear_primitive(id, PiecewisePoly::identity(-1.0, 2.0), id + 0.1, Orientation::Delegation);
  const BatteryReport a = equivalence_battery(pD, 40, 99, 10);
  const BatteryReport b = equivalence_battery(pD, 40, 99, 10);
  CHECK(a.passed());
  CHECK(a.max_gap_principal == b.max_gap_principal);
  CHECK(a.max_gap_agent == b.max_gap_agent);
  const Primitive wrong = delegation_to_persuasion(
      make_linear_primitive(id, PiecewisePoly::identity(-1.0, 2.0), id + 0.3, Orientation::Delegation));
  const BatteryReport bad = equivalence_battery(pD, 40, 99, 10, 1e-7, wrong);
  CHECK_FALSE(bad.passed());
  CHECK(bad.max_gap_principal > 1e-3);
}
