#include "monopart/scenario.hpp"

#include <fstream>
#include <sstream>

#include "monopart/equivalence.hpp"
#include "monopart/error.hpp"
#include "monopart/solver.hpp"

namespace monopart {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidScenario, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

json to_json(const Grid2D& g) {
  return {{"n_state", g.n_state()}, {"n_decision", g.n_decision()}, {"values", g.values()}};
}

Grid2D grid_from_json(const json& j) {
  const auto ns = field(j, "n_state").get<std::size_t>();
  const auto nx = field(j, "n_decision").get<std::size_t>();
  return Grid2D(ns, nx, field(j, "values").get<std::vector<double>>());
}

json to_json(const Marginal& m) { return {{"state", to_json(m.state)}, {"decision", to_json(m.decision)}}; }

Marginal marginal_from_json(const json& j) {
  return {poly_from_json(field(j, "state")), poly_from_json(field(j, "decision"))};
}

std::string_view kind_name(Primitive::Kind k) {
  switch (k) {
    case Primitive::Kind::Linear: return "linear";
    case Primitive::Kind::Separable: return "separable";
    case Primitive::Kind::Tabulated: return "tabulated";
  }
  return "unknown";
}

json to_json(const DistributionSpec& d) {
  switch (d.kind) {
    case DistributionSpec::Kind::Uniform: return {{"kind", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
    case DistributionSpec::Kind::Density: return {{"kind", "density"}, {"density", to_json(*d.density)}};
    case DistributionSpec::Kind::Quantile: {
      json j{{"kind", "quantile"}, {"quantile", to_json(*d.quantile)}};
      if (d.density) j["density"] = to_json(*d.density);
      return j;
    }
  }
  return {};
}

DistributionSpec distribution_from_json(const json& j) {
  DistributionSpec d;
  const auto kind = field(j, "kind").get<std::string>();
  if (kind == "uniform") {
    d.kind = DistributionSpec::Kind::Uniform;
    d.lo = j.contains("lo") ? number(j["lo"], "lo") : 0.0;
    d.hi = j.contains("hi") ? number(j["hi"], "hi") : 1.0;
  } else if (kind == "density") {
    d.kind = DistributionSpec::Kind::Density;
    d.density = poly_from_json(field(j, "density"));
  } else if (kind == "quantile") {
    d.kind = DistributionSpec::Kind::Quantile;
    d.quantile = poly_from_json(field(j, "quantile"));
    if (j.contains("density")) d.density = poly_from_json(j["density"]);
  } else {
    bad("unknown distribution kind '" + kind + "'");
  }
  return d;
}

TieBreak tie_break_from(const std::string& s) {
  for (TieBreak t : {TieBreak::PrincipalPreferred, TieBreak::PrincipalWorst, TieBreak::Lowest})
    if (s == to_string(t)) return t;
  bad("unknown tie_break '" + s + "'");
}

Orientation orientation_from(const std::string& s) {
  if (s == "delegation") return Orientation::Delegation;
  if (s == "persuasion") return Orientation::Persuasion;
  bad("orientation must be 'delegation' or 'persuasion'");
}

}  // namespace

QuantileDistribution DistributionSpec::build() const {
  switch (kind) {
    case Kind::Uniform: return QuantileDistribution::uniform(lo, hi);
    case Kind::Density: return QuantileDistribution::from_density(*density);
    case Kind::Quantile: return QuantileDistribution::from_quantile(*quantile, density);
  }
  bad("unknown distribution kind");
}

json to_json(const PiecewisePoly& p) {
  std::vector<std::vector<double>> pieces;
  for (const auto& c : p.pieces()) pieces.emplace_back(c.begin(), c.end());
  return {{"breaks", std::vector<double>(p.breaks().begin(), p.breaks().end())}, {"pieces", pieces}};
}

PiecewisePoly poly_from_json(const json& j) {
  try {
    if (j.is_object() && j.contains("global")) {
      const auto g = j["global"].get<std::vector<double>>();
      return PiecewisePoly::from_global(g, number(field(j, "lo"), "lo"), number(field(j, "hi"), "hi"));
    }
    auto breaks = field(j, "breaks").get<std::vector<double>>();
    auto raw = field(j, "pieces").get<std::vector<std::vector<double>>>();
    std::vector<Coeffs> pieces(raw.begin(), raw.end());
    return PiecewisePoly(std::move(breaks), std::move(pieces));
  } catch (const json::exception& e) {
    bad(std::string("malformed piecewise polynomial: ") + e.what());
  } catch (const Error& e) {
    bad(std::string("invalid piecewise polynomial: ") + e.what());
  }
}

json to_json(const MonotoneSet& s) {
  json iv = json::array();
  for (const Interval& i : s.intervals()) iv.push_back({i.lo, i.hi});
  return {{"lo", s.lo()}, {"hi", s.hi()}, {"intervals", iv}};
}

MonotoneSet set_from_json(const json& j) {
  try {
    std::vector<Interval> iv;
    for (const auto& e : field(j, "intervals")) {
      if (e.is_number()) iv.push_back({e.get<double>(), e.get<double>()});
      else iv.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    }
    return MonotoneSet(std::move(iv), number(field(j, "lo"), "lo"), number(field(j, "hi"), "hi"));
  } catch (const json::exception& e) {
    bad(std::string("malformed set: ") + e.what());
  } catch (const Error& e) {
    bad(std::string("invalid set: ") + e.what());
  }
}

Primitive Scenario::primitive() const {
  if (!kind) bad("scenario '" + name + "' has no primitive");
  auto dist = state_distribution();
  Primitive p = [&] {
    switch (*kind) {
      case Primitive::Kind::Linear:
        return make_linear_primitive(linear->b, linear->c, linear->d, orientation, dist);
      case Primitive::Kind::Separable: return Primitive::separable(*u, *v, orientation, dist);
      case Primitive::Kind::Tabulated:
        if (dist) bad("tabulated primitives take no distribution");
        return Primitive::tabulated(*du, *dv, orientation);
    }
    bad("unknown primitive kind");
  }();
  if (principal_anchor || agent_anchor) p = p.with_anchors(principal_anchor, agent_anchor);
  return p;
}

std::optional<QuantileDistribution> Scenario::state_distribution() const {
  if (!distribution) return std::nullopt;
  return distribution->build();
}

json to_json(const Scenario& s) {
  json j{{"name", s.name},
         {"orientation", std::string(to_string(s.orientation))},
         {"tie_break", std::string(to_string(s.tie_break))}};
  if (s.kind) {
    json p{{"kind", std::string(kind_name(*s.kind))}};
    if (s.linear) {
      p["b"] = to_json(s.linear->b);
      p["c"] = to_json(s.linear->c);
      p["d"] = to_json(s.linear->d);
    }
    if (s.u) p["u"] = to_json(*s.u);
    if (s.v) p["v"] = to_json(*s.v);
    if (s.du) p["du"] = to_json(*s.du);
    if (s.dv) p["dv"] = to_json(*s.dv);
    j["primitive"] = p;
  }
  if (s.distribution) j["distribution"] = to_json(*s.distribution);
  if (s.principal_anchor || s.agent_anchor) {
    json a = json::object();
    if (s.principal_anchor) a["principal"] = to_json(*s.principal_anchor);
    if (s.agent_anchor) a["agent"] = to_json(*s.agent_anchor);
    j["anchors"] = a;
  }
  if (!s.critical_points.empty()) j["critical_points"] = s.critical_points;
  if (s.candidate) j["candidate"] = to_json(*s.candidate);
  if (s.theta_bar) j["theta_bar"] = *s.theta_bar;
  if (s.reference_decision) j["reference_decision"] = *s.reference_decision;
  return j;
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) bad("scenario must be a JSON object");
  Scenario s;
  try {
    s.name = field(j, "name").get<std::string>();
    if (j.contains("orientation")) s.orientation = orientation_from(j["orientation"].get<std::string>());
    if (j.contains("tie_break")) s.tie_break = tie_break_from(j["tie_break"].get<std::string>());
    if (j.contains("primitive")) {
      const json& p = j["primitive"];
      const auto kind = field(p, "kind").get<std::string>();
      if (kind == "linear") {
        s.kind = Primitive::Kind::Linear;
        s.linear = LinearForm{poly_from_json(field(p, "b")), poly_from_json(field(p, "c")),
                              poly_from_json(field(p, "d"))};
      } else if (kind == "separable") {
        s.kind = Primitive::Kind::Separable;
        s.u = marginal_from_json(field(p, "u"));
        s.v = marginal_from_json(field(p, "v"));
      } else if (kind == "tabulated") {
        s.kind = Primitive::Kind::Tabulated;
        s.du = grid_from_json(field(p, "du"));
        s.dv = grid_from_json(field(p, "dv"));
      } else {
        bad("unknown primitive kind '" + kind + "'");
      }
    }
    if (j.contains("distribution")) s.distribution = distribution_from_json(j["distribution"]);
    if (j.contains("anchors")) {
      const json& a = j["anchors"];
      if (a.contains("principal")) s.principal_anchor = poly_from_json(a["principal"]);
      if (a.contains("agent")) s.agent_anchor = poly_from_json(a["agent"]);
    }
    if (j.contains("critical_points")) s.critical_points = j["critical_points"].get<std::vector<double>>();
    if (j.contains("candidate")) s.candidate = set_from_json(j["candidate"]);
    if (j.contains("theta_bar")) s.theta_bar = number(j["theta_bar"], "theta_bar");
    if (j.contains("reference_decision"))
      s.reference_decision = number(j["reference_decision"], "reference_decision");
  } catch (const json::exception& e) {
    bad(std::string("malformed scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

Scenario scenario_from_primitive(const Primitive& p0, std::string name) {
  const Primitive p = quantile_reparameterize(p0);
  Scenario s;
  s.name = std::move(name);
  s.orientation = p.orientation();
  s.kind = p.kind();
  if (p.is_tabulated()) {
    s.du = p.du_grid();
    s.dv = p.dv_grid();
  } else if (p.linear_form()) {
    s.linear = *p.linear_form();
  } else {
    s.u = p.u();
    s.v = p.v();
  }
  s.principal_anchor = p.principal_anchor();
  s.agent_anchor = p.agent_anchor();
  return s;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Built-in scenarios

namespace {

PiecewisePoly constant(double v, double lo = 0.0, double hi = 1.0) { return PiecewisePoly::constant(v, lo, hi); }
PiecewisePoly affine(double a, double b, double lo = 0.0, double hi = 1.0) {
  return PiecewisePoly({lo, hi}, {Coeffs{a + b * lo, b}});
}
PiecewisePoly triangular() { return PiecewisePoly({0.0, 0.5, 1.0}, {Coeffs{0.0, 4.0}, Coeffs{2.0, -4.0}}); }

Scenario kg() {
  Scenario s;
  s.name = "kg";
  s.orientation = Orientation::Delegation;
  s.kind = Primitive::Kind::Separable;
  s.u = Marginal{constant(0.0), PiecewisePoly({0.0, 0.7, 1.0}, {Coeffs{-0.5}, Coeffs{0.5}})};
  s.v = Marginal{constant(0.0), constant(1.0)};
  s.principal_anchor = constant(0.0);
  s.agent_anchor = constant(0.0);
  s.critical_points = {0.4};
  s.candidate = MonotoneSet::points({0.0, 0.4, 1.0});
  return s;
}

Scenario regulation_triangular() {
  Scenario s;
  s.name = "regulation-triangular";
  s.orientation = Orientation::Delegation;
  s.kind = Primitive::Kind::Separable;
  // Monopolist with cost g sets price x against demand 1 - x.
  s.u = Marginal{affine(1.0, 1.0), affine(0.0, 2.0)};
  s.v = Marginal{affine(0.0, 1.0), affine(0.0, 1.0)};
  s.distribution = DistributionSpec{DistributionSpec::Kind::Density, 0.0, 1.0, triangular(), std::nullopt};
  s.theta_bar = 1.0;
  return s;
}

Scenario producer() {
  Scenario s;
  s.name = "producer";
  s.orientation = Orientation::Persuasion;
  s.kind = Primitive::Kind::Linear;
  const PiecewisePoly q = QuantileDistribution::from_density(triangular()).quantile();
  s.linear = LinearForm{(q + 1.0) * 0.5, PiecewisePoly::identity(0.0, 1.0), q};
  const RegulationSolution sol = solve_upper_censorship(triangular(), 1.0);
  s.candidate = sol.pi;
  return s;
}

Scenario uniform_quadratic() {
  Scenario s;
  s.name = "uniform-quadratic";
  s.orientation = Orientation::Delegation;
  s.kind = Primitive::Kind::Linear;
  s.linear = LinearForm{PiecewisePoly::identity(0.0, 1.0), PiecewisePoly::identity(-5.0, 6.0), affine(0.1, 1.0)};
  s.reference_decision = 0.5;
  return s;
}

Scenario slope_family(double k) {
  Scenario s;
  s.name = k == 1.0 ? "uniform-slope-1" : "uniform-slope-3";
  s.orientation = Orientation::Delegation;
  s.kind = Primitive::Kind::Linear;
  s.linear = LinearForm{PiecewisePoly::identity(0.0, 1.0), PiecewisePoly::identity(-2.0, 3.0), affine(0.0, k)};
  s.critical_points = {1.5};
  return s;
}

// Quadratic loss for the agent, and for the principal around a target that
// jumps from 1/6 to 2/3 at `cut`.
Scenario step(double cut, Orientation o) {
  Scenario s;
  const bool del = o == Orientation::Delegation;
  s.name = std::string(del ? "step-delegation-" : "step-persuasion-") + (cut < 0.4 ? "1-3" : "5-12");
  s.orientation = o;
  s.kind = Primitive::Kind::Separable;
  const double xlo = del ? -1.0 : 0.0, xhi = del ? 2.0 : 1.0;
  const PiecewisePoly target({0.0, cut, 1.0}, {Coeffs{1.0 / 6.0}, Coeffs{2.0 / 3.0}});
  s.u = Marginal{affine(0.0, 2.0), affine(0.0, 2.0, xlo, xhi)};
  s.v = Marginal{target * 2.0, affine(0.0, 2.0, xlo, xhi)};
  // Payoff levels at the normalization decision.
  const PiecewisePoly t = PiecewisePoly::identity(0.0, 1.0);
  const double x0 = del ? xhi : xlo;
  s.agent_anchor = (t + (-x0)) * (t + (-x0)) * -1.0;
  s.principal_anchor = (target + (-x0)) * (target + (-x0)) * -1.0;
  s.critical_points = del ? std::vector<double>{1.0 / 6.0, 2.0 / 3.0} : std::vector<double>{cut};
  s.candidate = del ? MonotoneSet::points({xlo, 1.0 / 6.0, 2.0 / 3.0, xhi}, xlo, xhi)
                    : MonotoneSet::points({0.0, cut, 1.0});
  return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"kg",
          "regulation-triangular",
          "producer",
          "uniform-quadratic",
          "uniform-slope-1",
          "uniform-slope-3",
          "step-persuasion-1-3",
          "step-persuasion-5-12",
          "step-delegation-1-3",
          "step-delegation-5-12"};
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "kg") return kg();
  if (name == "regulation-triangular") return regulation_triangular();
  if (name == "producer") return producer();
  if (name == "uniform-quadratic") return uniform_quadratic();
  if (name == "uniform-slope-1") return slope_family(1.0);
  if (name == "uniform-slope-3") return slope_family(3.0);
  if (name == "step-persuasion-1-3") return step(1.0 / 3.0, Orientation::Persuasion);
  if (name == "step-persuasion-5-12") return step(5.0 / 12.0, Orientation::Persuasion);
  if (name == "step-delegation-1-3") return step(1.0 / 3.0, Orientation::Delegation);
  if (name == "step-delegation-5-12") return step(5.0 / 12.0, Orientation::Delegation);
  bad("no built-in scenario named '" + name + "'");
}

}  // namespace monopart
