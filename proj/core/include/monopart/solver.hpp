#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monopart/distribution.hpp"
#include "monopart/monotone_set.hpp"
#include "monopart/poly.hpp"
#include "monopart/primitive.hpp"
#include "monopart/valuation.hpp"

namespace monopart {

enum class Verdict { Verified, Refuted };
std::string_view to_string(Verdict v) noexcept;

struct Certificate {
  PiecewisePoly p_fn;
  /// Most negative curvature indicator of p: second derivatives, slope jumps
  /// at kinks and minus the size of any value jump.
  double convexity_residual = 0.0;
  /// min over the grid of p - nu.
  double dominance_gap = 0.0;
  Verdict verdict = Verdict::Refuted;
  /// Worst m when refuted.
  std::optional<double> witness;
  /// Absolute tolerance actually applied (tol scaled by the range of nu).
  double tol = 0.0;
  std::vector<std::string> notes;

  bool verified() const noexcept { return verdict == Verdict::Verified; }
};

/// Price function of pi as a function of m = c(s) on [c(lo), c(hi)]: nu on
/// separated stretches, the tangent at the pool mean on pooled ones.
PiecewisePoly price_function(const MonotoneSet& pi, const NuFunction& nu, const PiecewisePoly& c,
                             const std::optional<QuantileDistribution>& dist = std::nullopt);

/// Checks convexity of p and p >= nu on a 2049-point grid of [m_lo, m_hi]
/// plus every breakpoint of p and nu.
Certificate certify(PiecewisePoly p, const NuFunction& nu, double tol = 1e-9,
                    std::size_t grid = 2049);

Certificate verify_optimal(const MonotoneSet& pi, const NuFunction& nu, const PiecewisePoly& c,
                           const std::optional<QuantileDistribution>& dist = std::nullopt,
                           double tol = 1e-9);

struct RegulationSolution {
  double theta_star = 0.0;
  double theta_bar = 1.0;
  /// |nu(M) - nu(t) - (M - t) nu'(M)| at the solution, M = (theta_bar + t) / 2.
  double foc_residual = 0.0;
  /// Residual of the equivalent marginal-gain form (theta_bar of 1 or 2 only).
  std::optional<double> foc_rewrite_residual;
  std::pair<double, double> bracket;
  bool bracket_widened = false;
  double mode = 0.0;
  /// Regulated price as a function of the cost draw, on [0, 1].
  PiecewisePoly price_fn;
  MonotoneSet pi;
  /// Expected nu of pi, states weighted by Lebesgue measure on [0, theta_bar].
  double value = 0.0;
  NuFunction nu;
};

/// Upper censorship [0, t] with pooling interval [t, theta_bar] for a unimodal
/// cost density f on [0, 1].
RegulationSolution solve_upper_censorship(const PiecewisePoly& f, double theta_bar = 1.0);

/// Residual nu(M) - nu(t) - (M - t) nu'(M), M = (theta_bar + t) / 2.
double censorship_residual(const NuFunction& nu, double t, double theta_bar);

/// {x*}: p is 0 left of c(x*) and nu(1) + m - 1 right of it.
Certificate check_singleton(double x_star, const NuFunction& nu, const PiecewisePoly& c,
                            double tol = 1e-9);
/// [xL, xH]: p is 0, then nu, then nu(1) + m - 1.
Certificate check_interval(double x_lo, double x_hi, const NuFunction& nu, const PiecewisePoly& c,
                           double tol = 1e-9);
/// Everything outside (xL, xH): nu, then the tangent at the mean of c over
/// [xL, xH], then nu.
Certificate check_two_interval(double x_lo, double x_hi, const NuFunction& nu,
                               const PiecewisePoly& c, double tol = 1e-9);
/// {x0} together with [x*, hi]: the tangent at the mean of c over [x0, x*]
/// (c(x0) when x* = x0), then nu.
Certificate check_floor(double x0, double x_star, const NuFunction& nu, const PiecewisePoly& c,
                        double tol = 1e-9);

struct BoundingInterval {
  double y_lo, y_hi;
  /// Decisions the principal weakly prefers to z0 for some state.
  double z_lo, z_hi;
  /// Decisions not dominated for the agent given [z_lo, z_hi].
  double x_lo, x_hi;
  double reference_value;
};

/// Finite decision interval that contains every relevant optimal delegation
/// set, for a separable delegation primitive declared on a wide domain.
BoundingInterval bounding_interval(const Primitive& p, double z0, std::size_t grid = 4096);

}  // namespace monopart
