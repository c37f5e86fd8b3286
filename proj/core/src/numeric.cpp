#include "monopart/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace monopart::numeric {

std::optional<BisectionResult> bisect(const std::function<double(double)>& f, double lo, double hi,
                                      double x_tol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return BisectionResult{lo, 0.0, 0};
  if (fhi == 0.0) return BisectionResult{hi, 0.0, 0};
  if (std::signbit(flo) == std::signbit(fhi)) return std::nullopt;
  int it = 0;
  while (it < max_iter && hi - lo > x_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    ++it;
    if (fm == 0.0) return BisectionResult{mid, 0.0, it};
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  // Report the endpoint with the smaller residual.
  if (std::abs(flo) <= std::abs(fhi)) return BisectionResult{lo, flo, it};
  return BisectionResult{hi, fhi, it};
}

std::vector<double> all_roots(const std::function<double(double)>& f, double lo, double hi,
                              std::size_t samples, double x_tol) {
  std::vector<double> roots;
  double prev_x = lo, prev_f = f(lo);
  if (prev_f == 0.0) roots.push_back(lo);
  for (std::size_t k = 1; k <= samples; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples);
    const double fx = f(x);
    if (fx == 0.0) {
      if (prev_f != 0.0) roots.push_back(x);
    } else if (prev_f != 0.0 && std::signbit(prev_f) != std::signbit(fx)) {
      if (auto r = bisect(f, prev_x, x, x_tol)) roots.push_back(r->root);
    }
    prev_x = x;
    prev_f = fx;
  }
  return roots;
}

namespace {

GaussRule build_rule(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> cuts, std::size_t order) {
  if (b <= a) return 0.0;
  std::vector<double> pts{a, b};
  for (double c : cuts)
    if (c > a && c < b) pts.push_back(c);
  std::sort(pts.begin(), pts.end());
  const GaussRule& rule = gauss_legendre(order);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double l = pts[i], r = pts[i + 1];
    if (r - l <= 0.0) continue;
    const double half = 0.5 * (r - l), mid = 0.5 * (r + l);
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + half * rule.nodes[k]);
    total += half * s;
  }
  return total;
}

double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  if (n < 2) n = 2;
  const double h = (b - a) / static_cast<double>(n - 1);
  double s = 0.5 * (f(a) + f(b));
  for (std::size_t k = 1; k + 1 < n; ++k) s += f(a + h * static_cast<double>(k));
  return s * h;
}

double golden_max(const std::function<double(double)>& f, double a, double b, double x_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace monopart::numeric
