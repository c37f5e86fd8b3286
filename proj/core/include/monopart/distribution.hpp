#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "monopart/poly.hpp"

namespace monopart {

/// State distribution described by its quantile function on [0, 1].
///
/// Flats of the quantile are zero-density gaps and jumps are atoms. The
/// density, when known, is kept exactly; the quantile of a density-specified
/// distribution is a monotone cubic interpolant of the exactly inverted cdf.
class QuantileDistribution {
 public:
  static QuantileDistribution uniform(double lo = 0.0, double hi = 1.0);
  static QuantileDistribution from_quantile(PiecewisePoly quantile,
                                            std::optional<PiecewisePoly> density = std::nullopt);
  static QuantileDistribution from_density(PiecewisePoly density, std::size_t nodes = 8192);

  const PiecewisePoly& quantile() const noexcept { return quantile_; }
  const std::optional<PiecewisePoly>& density() const noexcept { return density_; }
  double lo() const { return quantile_(0.0); }
  double hi() const { return quantile_(1.0); }

  /// True when the quantile is affine (uniform state on [lo, hi]).
  bool is_uniform(double tol = 1e-12) const;
  /// P(state <= w). Exact through the density when present.
  double cdf(double w) const;
  /// Mode of the density on a fine grid (requires a density).
  double mode() const;
  /// Strictly increasing then strictly decreasing density with an interior mode.
  bool unimodal(std::size_t grid = 1024) const;

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  PiecewisePoly quantile_;
  std::optional<PiecewisePoly> density_;
  std::optional<PiecewisePoly> cdf_;
  std::vector<std::string> warnings_;

  void validate();
};

}  // namespace monopart
