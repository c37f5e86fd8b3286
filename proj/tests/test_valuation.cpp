#include <doctest.h>

#include <cmath>

#include "monopart/equivalence.hpp"
#include "monopart/error.hpp"
#include "monopart/scenario.hpp"
#include "monopart/valuation.hpp"
#include "support.hpp"

using namespace monopart;
using doctest::Approx;
namespace ts = testsupport;

namespace {

const PiecewisePoly id = PiecewisePoly::identity(0.0, 1.0);

double nearest(const MonotoneSet& s, double y) {
  double best = NAN, dist = INFINITY;
  for (const Interval& iv : s.intervals()) {
    const double x = std::clamp(y, iv.lo, iv.hi);
    if (std::abs(x - y) < dist) {
      dist = std::abs(x - y);
      best = x;
    }
  }
  return best;
}

// Midpoint rule over states with quadratic losses, levels at decision X.
std::pair<double, double> quadratic_delegation_oracle(const MonotoneSet& s, double bias, double X, int n = 200000) {
  double vp = 0.0, va = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n, x = nearest(s, t);
    va += 0.5 * ((t - X) * (t - X) - (t - x) * (t - x));
    vp += 0.5 * ((t + bias - X) * (t + bias - X) - (t + bias - x) * (t + bias - x));
  }
  return {vp / n, va / n};
}

}  // namespace

TEST_CASE("delegation payoffs match a brute-force quadrature") {
  const Primitive p = make_linear_primitive(id, PiecewisePoly::identity(-1.0, 2.0), id + 0.1, Orientation::Delegation);
  for (const MonotoneSet& s : {MonotoneSet::points({-1.0, 0.25, 0.5, 2.0}, -1.0, 2.0),
                               MonotoneSet({{-1.0, -1.0}, {0.1, 0.45}, {0.8, 0.8}, {2.0, 2.0}}, -1.0, 2.0),
                               MonotoneSet::full(-1.0, 2.0)}) {
    const auto [vp, va] = quadratic_delegation_oracle(s, 0.1, 2.0);
    const Payoffs got = expected_payoffs(p, s);
    CHECK(got.principal == Approx(vp).epsilon(1e-8));
    CHECK(got.agent == Approx(va).epsilon(1e-8));
  }
}

TEST_CASE("persuasion payoffs under quadratic loss") {
  // Receiver's loss is the residual variance; levels vanish at decision 0.
  const Primitive p = make_linear_primitive(id, id, id, Orientation::Persuasion);
  const MonotoneSet s({{0.0, 0.0}, {0.3, 0.5}, {1.0, 1.0}});
  double want = 0.0;
  for (auto [a, b] : {std::pair{0.0, 0.3}, {0.5, 1.0}}) {
    const double m = 0.5 * (a + b);
    want += (b - a) * 0.5 * m * m;  // E[t x - x^2/2] at x = m
  }
  want += ts::simpson([](double t) { return 0.5 * t * t; }, 0.3, 0.5);
  const Payoffs got = expected_payoffs(p, s);
  CHECK(got.agent == Approx(want).epsilon(1e-12));
  CHECK(got.principal == Approx(want).epsilon(1e-12));
}

TEST_CASE("tabulated and closed-form paths agree") {
  const Grid2D du = Grid2D::sample([](double t, double x) { return t - x; });
  const Grid2D dv = Grid2D::sample([](double t, double x) { return t + 0.1 - x; });
  const Primitive tab = Primitive::tabulated(du, dv, Orientation::Delegation);
  const Primitive lin = make_linear_primitive(id, id, id + 0.1, Orientation::Delegation);
  const MonotoneSet s = MonotoneSet::points({0.0, 0.3, 0.55, 1.0});
  const Payoffs a = expected_payoffs(tab, s), b = expected_payoffs(lin, s);
  CHECK(a.principal == Approx(b.principal).epsilon(1e-6));
  CHECK(a.agent == Approx(b.agent).epsilon(1e-6));
  const Primitive tabP = delegation_to_persuasion(tab), linP = delegation_to_persuasion(lin);
  CHECK(expected_payoffs(tabP, s).principal == Approx(expected_payoffs(linP, s).principal).epsilon(1e-6));
}

TEST_CASE("state distributions weight states by their density") {
  const ts::Density tri = ts::triangular();
  const auto dist = QuantileDistribution::from_density(tri.poly);
  const Primitive p = make_linear_primitive(id, PiecewisePoly::identity(-1.0, 2.0), id + 0.1, Orientation::Delegation, dist);
  const MonotoneSet s = MonotoneSet::points({-1.0, 0.3, 0.7, 2.0}, -1.0, 2.0);
  auto va = [&](double t) {
    const double x = nearest(s, t);
    return tri.f(t) * 0.5 * ((t - 2.0) * (t - 2.0) - (t - x) * (t - x));
  };
  const double want = ts::simpson_split(va, 0.0, 1.0, {0.5, 0.5}, 4000);
  CHECK(expected_payoffs(p, s).agent == Approx(want).epsilon(1e-6));
}

TEST_CASE("anchors turn normalized values into levels") {
  // U = -(t - x)^2 / 2 on [0, 1]: the level at decision 1 is -(t - 1)^2 / 2.
  const PiecewisePoly anchor = (id + -1.0) * (id + -1.0) * -0.5;
  const Primitive p = make_linear_primitive(id, id, id, Orientation::Delegation).with_anchors(anchor, anchor);
  const Payoffs v = expected_payoffs(p, MonotoneSet::points({0.0, 0.5, 1.0}));
  // Nearest of {0, 1/2, 1}: loss E[(t - x)^2]/2 = (1/4)^3/3 * 4 / 2.
  CHECK(*v.agent_unnormalized == Approx(-1.0 / 96.0).epsilon(1e-12));
}

TEST_CASE("regulation nu against its definition") {
  for (const ts::Density& d : ts::unimodal_densities()) {
    const NuFunction nu = NuFunction::regulation(d.poly, 2.0);
    CHECK(nu.lo() == 0.0);
    CHECK(nu.hi() == 2.0);
    for (double m : {0.2, 0.5, 0.61, 0.77, 0.93, 1.0, 1.4, 2.0}) {
      CHECK(nu(m) == Approx(ts::regulation_nu(d, m)).epsilon(1e-12));
      if (m > 0.5 && m < 1.0) {
        const double g = 2.0 * m - 1.0;
        CHECK(nu.dnu()(m) == Approx(d.F(g) + 2.0 * (1.0 - m) * d.f(g)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("nu of a linear persuasion primitive") {
  // b(x) = 2x + 0.5 on [0, 1], d(x) = x^2: x(m) = (m - 0.5)/2, nu = m x - x^3/3.
  const PiecewisePoly b = PiecewisePoly::from_global(std::vector<double>{0.5, 2.0}, 0.0, 1.0);
  const PiecewisePoly d = PiecewisePoly::from_global(std::vector<double>{0.0, 0.0, 1.0}, 0.0, 1.0);
  const PiecewisePoly c = PiecewisePoly::identity(0.0, 3.0);
  const Primitive p = make_linear_primitive(b, c, d, Orientation::Persuasion);
  const NuFunction nu = build_nu(p);
  for (double m : {0.0, 0.3, 0.9, 1.7, 2.5, 3.0}) {
    const double x = std::clamp((m - 0.5) / 2.0, 0.0, 1.0);
    CHECK(nu(m) == Approx(m * x - x * x * x / 3.0).epsilon(1e-12));
  }
  // Expected nu is the principal's payoff.
  for (const MonotoneSet& s : {MonotoneSet::points({0.0, 1.2, 3.0}, 0.0, 3.0),
                               MonotoneSet({{0.0, 0.7}, {2.0, 2.2}, {3.0, 3.0}}, 0.0, 3.0)})
    CHECK(expected_nu(s, nu, c) == Approx(expected_payoffs(p, s).principal).epsilon(1e-10));
}

TEST_CASE("nu of a linear delegation primitive goes through the transform") {
  // b(t) = t, c(x) = x, d(t) = 3t: nu(m) = int_0^m (m - 3t) dt = -m^2 / 2 on [0, 1].
  const Primitive pD = make_linear_primitive(id, PiecewisePoly::identity(-2.0, 3.0), id * 3.0, Orientation::Delegation);
  const NuFunction nu = build_nu(pD);
  CHECK(nu(0.6) == Approx(-0.18));
  CHECK(nu(-1.0) == Approx(0.0));
  CHECK(nu(2.0) == Approx(0.5));
  const NuFunction direct = NuFunction::linear_delegation(id * 3.0, PiecewisePoly::constant(1.0, 0.0, 1.0), -2.0, 3.0);
  for (double m : {-1.5, 0.2, 0.9, 2.5}) CHECK(direct(m) == Approx(nu(m)).epsilon(1e-12));
  const Primitive pP = delegation_to_persuasion(pD);
  const MonotoneSet s = MonotoneSet::points({-2.0, 1.5, 3.0}, -2.0, 3.0);
  CHECK(expected_nu(s, nu, pP.u().state) == Approx(expected_payoffs(pD, s).principal).epsilon(1e-10));
}

TEST_CASE("cell payoffs add up to the partition payoff") {
  const Primitive p = make_linear_primitive(id, id, id + 0.2, Orientation::Persuasion);
  const MonotoneSet s({{0.0, 0.0}, {0.25, 0.5}, {1.0, 1.0}});
  const Payoffs a = persuasion_cell_payoffs(p, 0.0, 0.25, true);
  const Payoffs b = persuasion_cell_payoffs(p, 0.25, 0.5, false);
  const Payoffs c = persuasion_cell_payoffs(p, 0.5, 1.0, true);
  const Payoffs all = expected_payoffs(p, s);
  CHECK(a.principal + b.principal + c.principal == Approx(all.principal).epsilon(1e-12));
  CHECK(a.agent + b.agent + c.agent == Approx(all.agent).epsilon(1e-12));
  const auto tri = QuantileDistribution::from_density(ts::triangular().poly);
  CHECK_THROWS_AS(persuasion_cell_payoffs(make_linear_primitive(id, id, id, Orientation::Persuasion, tri), 0.0, 1.0, true),
                  Error);
}

TEST_CASE("separated and pooled values") {
  const NuFunction nu = NuFunction::direct(PiecewisePoly::from_global(std::vector<double>{0.0, 0.0, 1.0}, 0.0, 1.0));
  CHECK(separated_value(nu, id, 0.2, 0.6) == Approx((0.216 - 0.008) / 3.0));
  CHECK(pooled_value(nu, id, 0.2, 0.6) == Approx(0.4 * 0.16));
  CHECK(expected_nu(MonotoneSet({{0.0, 0.2}, {0.6, 1.0}}), nu, id) ==
        Approx(0.008 / 3.0 + 0.4 * 0.16 + (1.0 - 0.216) / 3.0));
}

TEST_CASE("unbalanced sets and foreign domains are rejected") {
  const Primitive p = make_linear_primitive(id, id, id, Orientation::Delegation);
  CHECK_THROWS_AS(expected_payoffs(p, MonotoneSet::points({0.3, 1.0})), Error);
  CHECK_THROWS_AS(expected_payoffs(p, MonotoneSet::points({0.0, 2.0}, 0.0, 2.0)), Error);
}

TEST_CASE("quadratic losses with a bias: two decisions against full discretion") {
  // V = -(t + 0.1 - x)^2 / 2, levels anchored at decision 6.
  Scenario s = builtin_scenario("uniform-quadratic");
  const PiecewisePoly vp = (id + -5.9) * (id + -5.9) * -0.5, va = (id + -6.0) * (id + -6.0) * -0.5;
  const Primitive p = s.primitive().with_anchors(vp, va);
  // Agent takes 0 below 1/2 and 1 above: -(int_0^.5 (t + .1)^2 + int_.5^1 (t - .9)^2) / 2.
  const double two = -0.5 * ((0.216 - 0.001) + (0.001 + 0.064)) / 3.0;
  CHECK(*expected_payoffs(p, MonotoneSet({{-5.0, -5.0}, {0.0, 0.0}, {1.0, 1.0}, {6.0, 6.0}}, -5.0, 6.0))
             .principal_unnormalized == Approx(two).epsilon(1e-10));
  // Full discretion: x = t, loss delta^2 / 2.
  CHECK(*expected_payoffs(p, MonotoneSet({{-5.0, -5.0}, {0.0, 1.0}, {6.0, 6.0}}, -5.0, 6.0)).principal_unnormalized ==
        Approx(-0.005).epsilon(1e-10));
}
