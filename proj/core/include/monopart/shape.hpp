#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "monopart/solver.hpp"

namespace monopart {

enum class Shape { Convex, Concave, ConvexConcave, ConcaveConvex };
std::string_view to_string(Shape s) noexcept;

/// Signs of nu's second differences on an (n+1)-node grid of [a, b], with
/// runs collapsed and exact zeros skipped.
struct CurvatureProfile {
  std::vector<int> signs;
  /// Midpoints between the last node of one run and the first of the next.
  std::vector<double> changes;
  double a = 0.0, b = 1.0;
  std::size_t n = 512;
};
CurvatureProfile curvature_profile(const NuFunction& nu, double a, double b, std::size_t n = 512);

struct ShapeSolution {
  Shape shape;
  /// Part and case, e.g. "3a".
  std::string case_label;
  MonotoneSet pi;
  Certificate certificate;
  double value = 0.0;
  std::optional<double> inflection;
  /// Interior cutoffs, in increasing order.
  std::vector<double> cutoffs;
  /// More than one verified candidate was found.
  bool multiple = false;
  double slope_lo = 0.0, slope_hi = 0.0;
  std::vector<std::string> notes;
};

/// Optimal balanced set on the domain of c for a nu that is convex, concave,
/// convex-concave or concave-convex on [0, 1] (in m).
ShapeSolution classify_and_solve(const NuFunction& nu, const PiecewisePoly& c,
                                 const std::optional<QuantileDistribution>& dist = std::nullopt);

}  // namespace monopart
