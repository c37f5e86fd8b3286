#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monopart/agent.hpp"
#include "monopart/monotone_set.hpp"
#include "monopart/primitive.hpp"
#include "monopart/valuation.hpp"

namespace monopart {

enum class OracleMode { Persuasion, Delegation };

/// Grid-aligned candidate: bit i-1 of `nodes` puts interior node i in the set,
/// bit i of `separated` puts the whole cell [g_i, g_{i+1}] in it (both of its
/// nodes must be in). Everything between consecutive members is pooled.
struct GridCode {
  std::uint32_t nodes = 0;
  std::uint32_t separated = 0;
  friend auto operator<=>(const GridCode&, const GridCode&) = default;
};

struct OracleOptions {
  std::size_t n = 12;
  TieBreak tb = TieBreak::PrincipalPreferred;
  /// Points that replace their nearest grid nodes.
  std::vector<double> critical_points;
  std::size_t top_k = 5;
};

struct RankedSet {
  MonotoneSet set;
  GridCode code;
  double value;
  std::optional<double> agent_value;
};

struct OracleResult {
  MonotoneSet best;
  GridCode code;
  double value = 0.0;
  std::vector<RankedSet> top;
  std::size_t evaluated = 0;
  std::vector<double> grid;
};

/// Uniform grid on [lo, hi] with n cells, critical points snapped in.
std::vector<double> snapped_grid(double lo, double hi, std::size_t n, std::span<const double> critical);
MonotoneSet decode(const GridCode& code, std::span<const double> grid);
/// Number of distinct codes for n cells.
std::uint64_t candidate_count(std::size_t n);

/// Exhaustive search over grid-aligned sets, scored by the principal's
/// normalized payoff. The grid lives on the state domain (persuasion) or the
/// decision domain (delegation). Ties go to the smallest code.
OracleResult enumerate_optimum(const Primitive& p, OracleMode mode, const OracleOptions& opt = {});
/// Same search scored by expected_nu.
OracleResult enumerate_optimum(const NuFunction& nu, const PiecewisePoly& c, const OracleOptions& opt = {});

struct BatteryReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t n = 0;
  double tol = 0.0;
  double max_gap_principal = 0.0;
  double max_gap_agent = 0.0;
  /// Sets whose payoffs disagree beyond tol.
  std::vector<std::string> violations;
  bool passed() const noexcept { return violations.empty(); }
};

/// Compares delegation payoffs of pD with persuasion payoffs of its transform
/// (or of `pP` when given) on random grid-aligned sets.
BatteryReport equivalence_battery(const Primitive& pD, std::size_t trials, std::uint64_t seed,
                                  std::size_t n = 16, double tol = 1e-7,
                                  const std::optional<Primitive>& pP = std::nullopt);

}  // namespace monopart
