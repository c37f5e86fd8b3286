#pragma once

// Independent reference computations shared by the test programs. Nothing
// here calls into the library's integrators or solvers.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "monopart/poly.hpp"

namespace testsupport {

/// Composite Simpson rule with n (even) panels. Exact for cubics.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Simpson over [a, b] split at the given breaks. Panel ends are pulled in
/// by a relative 1e-13 so each panel sees only its own piece.
inline double simpson_split(const std::function<double(double)>& f, double a, double b,
                            const std::vector<double>& breaks, int n = 2) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > cuts.back() && x < b) cuts.push_back(x);
  cuts.push_back(b);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = cuts[i], r = cuts[i + 1], eps = 1e-13 * (r - l);
    s += simpson(f, l + eps, r - eps, n) * (r - l) / (r - l - 2.0 * eps);
  }
  return s;
}

/// Unimodal density on [0, 1]: a test case with a closed form.
struct Density {
  std::string name;
  double mode;
  std::function<double(double)> f;
  std::vector<double> breaks;
  monopart::PiecewisePoly poly;

  /// P(g <= x) and int_0^x g f(g) dg; exact for piecewise quadratics.
  double F(double x) const { return simpson_split(f, 0.0, x, breaks); }
  double G(double x) const {
    return simpson_split([&](double g) { return g * f(g); }, 0.0, x, breaks);
  }
};

inline Density triangular() {
  return {"triangular", 0.5, [](double g) { return g < 0.5 ? 4.0 * g : 4.0 - 4.0 * g; }, {0.5},
          monopart::PiecewisePoly({0.0, 0.5, 1.0}, {monopart::Coeffs{0.0, 4.0}, monopart::Coeffs{2.0, -4.0}})};
}

/// 1.5 (1 - ((m - g)/m)^2) left of the mode, 1.5 (1 - ((g - m)/(1 - m))^2) right of it.
inline Density capped_quadratic(double m) {
  const double h = 1.5;
  auto f = [m, h](double g) {
    const double r = g < m ? (m - g) / m : (g - m) / (1.0 - m);
    return h * (1.0 - r * r);
  };
  // Local coordinate u = g - break.
  const double l = m, r = 1.0 - m;
  monopart::Coeffs left{0.0, 2.0 * h / l, -h / (l * l)};
  monopart::Coeffs right{h, 0.0, -h / (r * r)};
  return {"quadratic-mode-" + std::to_string(m).substr(0, 4), m, f, {m},
          monopart::PiecewisePoly({0.0, m, 1.0}, {left, right})};
}

inline std::vector<Density> unimodal_densities() {
  return {triangular(), capped_quadratic(0.3), capped_quadratic(0.65)};
}

/// gain(a, b) = t (F(b) - F(a)) - (G(b) - G(a)).
inline double gain(const Density& d, double t, double a, double b) {
  return t * (d.F(b) - d.F(a)) - (d.G(b) - d.G(a));
}

/// Marginal-gain first-order conditions for upper censorship with the pool
/// ending at 1 (participation) and at 2 (no participation).
inline double foc_participation(const Density& d, double t) {
  return gain(d, t, std::max(0.0, 2.0 * t - 1.0), t) - 0.5 * (1.0 - t) * (1.0 - t) * d.f(t);
}
inline double foc_free(const Density& d, double t) { return gain(d, t, std::max(0.0, 2.0 * t - 1.0), 1.0); }

/// nu(m) for the regulation problem straight from its definition.
inline double regulation_nu(const Density& d, double m) {
  if (m <= 0.5) return 0.0;
  const double top = std::min(1.0, 2.0 * m - 1.0);
  return m * d.F(top) - d.G(top);
}

/// Value of a layout with c(y) = y: cuts z_0 < ... < z_K and one flag per
/// block (true = pooled). Separated blocks integrate nu, pooled ones take
/// nu at the midpoint. nu may kink at 0 and 1.
inline double layout_value(const std::function<double(double)>& nu, const std::vector<double>& z,
                           const std::vector<bool>& pooled, int n = 400) {
  double v = 0.0;
  for (std::size_t j = 0; j + 1 < z.size(); ++j) {
    const double a = z[j], b = z[j + 1];
    if (!(b > a)) continue;
    v += pooled[j] ? (b - a) * nu(0.5 * (a + b)) : simpson_split(nu, a, b, {0.0, 1.0}, n);
  }
  return v;
}

}  // namespace testsupport
