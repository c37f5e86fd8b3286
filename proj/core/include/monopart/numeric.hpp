#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace monopart::numeric {

struct BisectionResult {
  double root;
  double residual;
  int iterations;
};

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs (or one is zero).
/// Stops when the bracket is narrower than x_tol or after max_iter halvings.
/// Returns nullopt if the endpoints do not bracket a sign change.
std::optional<BisectionResult> bisect(const std::function<double(double)>& f, double lo, double hi,
                                      double x_tol = 1e-12, int max_iter = 200);

/// Samples f on a uniform grid of `samples` cells and bisects every sign change.
std::vector<double> all_roots(const std::function<double(double)>& f, double lo, double hi,
                              std::size_t samples, double x_tol = 1e-12);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(std::size_t n);

/// Integral of f over [a, b], Gauss-Legendre on each sub-interval delimited by
/// `cuts` (which may be unsorted and may fall outside [a, b]).
double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> cuts, std::size_t order = 20);

/// Composite trapezoid on n equally spaced nodes.
double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t n);

/// Golden-section maximization of a unimodal function on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b, double x_tol = 1e-10);

}  // namespace monopart::numeric
