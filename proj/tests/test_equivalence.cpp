#include <doctest.h>

#include <cmath>

#include "monopart/equivalence.hpp"
#include "monopart/error.hpp"
#include "monopart/valuation.hpp"
#include "support.hpp"

using namespace monopart;
using doctest::Approx;

namespace {

PiecewisePoly gpoly(std::vector<double> g, double lo = 0.0, double hi = 1.0) {
  return PiecewisePoly::from_global(g, lo, hi);
}

Primitive cubic_delegation() {
  return make_linear_primitive(gpoly({0.1, 1.0, 0.5}), gpoly({0.0, 1.0, 0.0, 0.2}, -1.0, 2.0), gpoly({0.3, 0.8, 0.4}),
                               Orientation::Delegation);
}

}  // namespace

TEST_CASE("delegation to persuasion swaps and negates the marginals") {
  const Primitive pD = cubic_delegation();
  const Primitive pP = delegation_to_persuasion(pD);
  CHECK(pP.orientation() == Orientation::Persuasion);
  CHECK(pP.state_lo() == -1.0);
  CHECK(pP.state_hi() == 2.0);
  CHECK(pP.decision_lo() == 0.0);
  for (double t : {-1.0, -0.2, 0.7, 2.0})
    for (double x : {0.0, 0.3, 1.0}) {
      const double c = t + 0.2 * t * t * t;
      CHECK(pP.dU(t, x) == Approx(c - (0.1 + x + 0.5 * x * x)));
      CHECK(pP.dV(t, x) == Approx(c - (0.3 + 0.8 * x + 0.4 * x * x)));
    }
  const DualityResidual r = duality_residual(pD, pP);
  CHECK(r.max_abs_U <= 1e-14);
  CHECK(r.max_abs_V <= 1e-14);
}

TEST_CASE("the two transforms are inverse") {
  const Primitive pD = cubic_delegation();
  const Primitive back = persuasion_to_delegation(delegation_to_persuasion(pD));
  CHECK(back.orientation() == Orientation::Delegation);
  for (double t : {0.0, 0.5, 1.0})
    for (double x : {-1.0, 0.5, 2.0}) {
      CHECK(back.dU(t, x) == Approx(pD.dU(t, x)));
      CHECK(back.dV(t, x) == Approx(pD.dV(t, x)));
    }
}

TEST_CASE("a mismatched pair shows a duality residual") {
  const Primitive pD = cubic_delegation();
  const Primitive other = delegation_to_persuasion(
      make_linear_primitive(gpoly({0.1, 1.0, 0.5}), gpoly({0.0, 1.0, 0.0, 0.2}, -1.0, 2.0), gpoly({0.5, 0.8, 0.4}),
                            Orientation::Delegation));
  const DualityResidual r = duality_residual(pD, other);
  CHECK(r.max_abs_U <= 1e-14);
  CHECK(r.max_abs_V == Approx(0.2));
}

TEST_CASE("tabulated primitives are transposed") {
  const Grid2D du = Grid2D::sample([](double t, double x) { return t - x * x; }, 33);
  const Grid2D dv = Grid2D::sample([](double t, double x) { return 2.0 * t - x; }, 33);
  const Primitive pD = Primitive::tabulated(du, dv, Orientation::Delegation);
  const Primitive pP = delegation_to_persuasion(pD);
  CHECK(pP.is_tabulated());
  CHECK(pP.dU(0.25, 0.75) == Approx(-(0.75 - 0.0625)));
  CHECK(pP.dV(0.5, 0.125) == Approx(-(0.25 - 0.5)));
  CHECK(duality_residual(pD, pP).max_abs_U <= 1e-14);
}

TEST_CASE("quantile reparameterization composes the state parts") {
  const PiecewisePoly id = PiecewisePoly::identity(0.0, 1.0);
  const auto tri = QuantileDistribution::from_density(testsupport::triangular().poly);
  const Primitive p = make_linear_primitive(id, id, id + 0.1, Orientation::Delegation, tri);
  const Primitive q = quantile_reparameterize(p);
  CHECK_FALSE(q.state_dist());
  // Triangular quantile in closed form.
  auto Q = [](double u) { return u <= 0.5 ? std::sqrt(u / 2.0) : 1.0 - std::sqrt((1.0 - u) / 2.0); };
  for (double u : {0.05, 0.3, 0.5, 0.8, 0.97}) {
    CHECK(q.dU(u, 0.4) == Approx(Q(u) - 0.4).epsilon(1e-6));
    CHECK(q.dV(u, 0.4) == Approx(Q(u) + 0.1 - 0.4).epsilon(1e-6));
  }
  const Primitive plain = make_linear_primitive(id, id, id, Orientation::Delegation);
  CHECK(quantile_reparameterize(plain).dU(0.3, 0.1) == Approx(0.2));
}

TEST_CASE("expected payoffs agree across the transform with a state distribution") {
  const PiecewisePoly id = PiecewisePoly::identity(0.0, 1.0);
  const auto tri = QuantileDistribution::from_density(testsupport::triangular().poly);
  const Primitive pD = make_linear_primitive(id, PiecewisePoly::identity(-1.0, 2.0), id + 0.15,
                                             Orientation::Delegation, tri);
  const Primitive pP = delegation_to_persuasion(pD);
  for (const MonotoneSet& s : {MonotoneSet::points({-1.0, 0.3, 0.7, 2.0}, -1.0, 2.0),
                               MonotoneSet({{-1.0, -1.0}, {0.2, 0.6}, {2.0, 2.0}}, -1.0, 2.0)}) {
    const Payoffs d = expected_payoffs(pD, s), p = expected_payoffs(pP, s);
    CHECK(d.principal == Approx(p.principal).epsilon(1e-9));
    CHECK(d.agent == Approx(p.agent).epsilon(1e-9));
  }
}

TEST_CASE("transform orientation errors") {
  const Primitive pD = cubic_delegation();
  CHECK_THROWS_AS(persuasion_to_delegation(pD), Error);
  CHECK_THROWS_AS(delegation_to_persuasion(delegation_to_persuasion(pD)), Error);
}
