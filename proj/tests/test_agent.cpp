#include <doctest.h>

#include <cmath>
#include <random>

#include "monopart/agent.hpp"
#include "monopart/error.hpp"
#include "support.hpp"

using namespace monopart;
using doctest::Approx;

namespace {

const PiecewisePoly id = PiecewisePoly::identity(0.0, 1.0);

// Closest element of a closed set to y (the quadratic agent's choice).
double project(const MonotoneSet& s, double y) {
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

}  // namespace

TEST_CASE("quadratic delegation picks the nearest available decision") {
  const Primitive p = make_linear_primitive(id, PiecewisePoly::identity(-1.0, 2.0), id + 0.1, Orientation::Delegation);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> pts{u(rng), u(rng), u(rng), u(rng)};
    std::sort(pts.begin(), pts.end());
    const MonotoneSet s({{-1.0, -1.0}, {pts[0], pts[1]}, {pts[2], pts[2]}, {pts[3], pts[3]}, {2.0, 2.0}}, -1.0, 2.0);
    for (double t = 0.0; t <= 1.0; t += 0.0625) CHECK(best_decision_delegation(p, s, t) == Approx(project(s, t)));
  }
}

TEST_CASE("ties in delegation follow the tie-break rule") {
  const Primitive p = make_linear_primitive(id, id, id + 0.1, Orientation::Delegation);
  const MonotoneSet s = MonotoneSet::points({1.0 / 6.0, 2.0 / 3.0});
  const double t = 5.0 / 12.0;
  // Principal's ideal is t + 0.1, closer to 2/3.
  CHECK(best_decision_delegation(p, s, t, TieBreak::PrincipalPreferred) == Approx(2.0 / 3.0));
  CHECK(best_decision_delegation(p, s, t, TieBreak::PrincipalWorst) == Approx(1.0 / 6.0));
  CHECK(best_decision_delegation(p, s, t, TieBreak::Lowest) == Approx(1.0 / 6.0));
}

TEST_CASE("receiver acts on the posterior mean of c") {
  // c(t) = t^2 + t, decision part b(x) = 2x: receiver picks half the mean.
  const PiecewisePoly c = PiecewisePoly::from_global(std::vector<double>{0.0, 1.0, 1.0}, 0.0, 1.0);
  const PiecewisePoly b = PiecewisePoly::from_global(std::vector<double>{0.0, 2.0}, 0.0, 1.0);
  const Primitive p = make_linear_primitive(b, c, b, Orientation::Persuasion);
  const MonotoneSet s({{0.0, 0.0}, {0.4, 0.5}, {1.0, 1.0}});
  auto cf = [](double t) { return t * t + t; };
  const double m1 = testsupport::simpson(cf, 0.0, 0.4) / 0.4;
  const double m2 = testsupport::simpson(cf, 0.5, 1.0) / 0.5;
  CHECK(posterior_mean(s, 0.2, c) == Approx(m1));
  CHECK(best_decision_persuasion(p, s, 0.2) == Approx(m1 / 2.0));
  CHECK(best_decision_persuasion(p, s, 0.45) == Approx(cf(0.45) / 2.0));
  CHECK(best_decision_persuasion(p, s, 0.7) == Approx(m2 / 2.0));
  CHECK(best_decision_element(p, Element{0.5, 1.0, true}) == Approx(m2 / 2.0));
}

TEST_CASE("receiver choices are clamped to the decision domain") {
  const Primitive p = make_linear_primitive(PiecewisePoly::identity(0.0, 0.5), id, PiecewisePoly::identity(0.0, 0.5),
                                            Orientation::Persuasion);
  const MonotoneSet s = MonotoneSet::full();
  CHECK(best_decision_persuasion(p, s, 0.9) == Approx(0.5));
  CHECK(best_decision_persuasion(p, s, 0.3) == Approx(0.3));
}

TEST_CASE("indifference state solves b(t) = mean of c between the two decisions") {
  const PiecewisePoly c = PiecewisePoly::from_global(std::vector<double>{0.0, 1.0, 0.0, 0.5}, -1.0, 2.0);
  const Primitive p = make_linear_primitive(id, c, id, Orientation::Delegation);
  const double want = testsupport::simpson([](double x) { return x + 0.5 * x * x * x; }, 0.2, 0.8) / 0.6;
  CHECK(indifference_state(p, 0.2, 0.8) == Approx(want).epsilon(1e-12));
  // No state in [0, 1] is indifferent: clamped.
  CHECK(indifference_state(p, 1.5, 2.0) == Approx(1.0));
  CHECK_THROWS_AS(indifference_state(p, 0.5, 0.5), Error);
}

TEST_CASE("orientation is checked") {
  const Primitive d = make_linear_primitive(id, id, id, Orientation::Delegation);
  const Primitive q = make_linear_primitive(id, id, id, Orientation::Persuasion);
  const MonotoneSet s = MonotoneSet::full();
  CHECK_THROWS_AS(best_decision_persuasion(d, s, 0.5), Error);
  CHECK_THROWS_AS(best_decision_delegation(q, s, 0.5), Error);
  CHECK_THROWS_AS(best_decision_delegation(d, MonotoneSet({}, 0.0, 1.0), 0.5), Error);
}
