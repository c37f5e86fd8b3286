#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monopart/agent.hpp"
#include "monopart/distribution.hpp"
#include "monopart/monotone_set.hpp"
#include "monopart/primitive.hpp"

namespace monopart {

struct DistributionSpec {
  enum class Kind { Uniform, Density, Quantile };
  Kind kind = Kind::Uniform;
  double lo = 0.0, hi = 1.0;
  std::optional<PiecewisePoly> density;
  std::optional<PiecewisePoly> quantile;

  QuantileDistribution build() const;
};

/// A problem instance as read from a scenario file. Every field except the
/// name is optional so that one schema covers primitives, regulation
/// densities and candidate sets.
struct Scenario {
  std::string name;
  Orientation orientation = Orientation::Delegation;
  std::optional<Primitive::Kind> kind;
  std::optional<LinearForm> linear;
  std::optional<Marginal> u, v;
  std::optional<Grid2D> du, dv;
  std::optional<DistributionSpec> distribution;
  std::optional<PiecewisePoly> principal_anchor, agent_anchor;
  std::vector<double> critical_points;
  std::optional<MonotoneSet> candidate;
  TieBreak tie_break = TieBreak::PrincipalPreferred;
  /// Upper end of the pooling interval for regulation scenarios.
  std::optional<double> theta_bar;
  /// Reference decision for the bounding interval.
  std::optional<double> reference_decision;

  bool has_primitive() const noexcept { return kind.has_value(); }
  Primitive primitive() const;
  std::optional<QuantileDistribution> state_distribution() const;
};

nlohmann::json to_json(const PiecewisePoly& p);
PiecewisePoly poly_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MonotoneSet& s);
MonotoneSet set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Scenario& s);
/// Throws Error(InvalidScenario) on schema violations.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
/// Sorted keys, two-space indent, shortest round-trip numbers.
std::string canonical_dump(const nlohmann::json& j);

/// Scenario describing an existing primitive (anchors included, no
/// distribution: the primitive is reparameterized first).
Scenario scenario_from_primitive(const Primitive& p, std::string name);

/// Scenarios that ship with the library.
std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);

}  // namespace monopart
