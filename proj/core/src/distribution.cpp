#include "monopart/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "monopart/error.hpp"

namespace monopart {

namespace {

constexpr std::size_t kValidationGrid = 1024;

double grid_point(double lo, double hi, std::size_t k, std::size_t n) {
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
}

}  // namespace

QuantileDistribution QuantileDistribution::uniform(double lo, double hi) {
  if (!(lo < hi)) throw Error(ErrorKind::InvalidArgument, "uniform support must have lo < hi");
  QuantileDistribution d;
  d.quantile_ = PiecewisePoly({0.0, 1.0}, {Coeffs{lo, hi - lo}});
  d.density_ = PiecewisePoly::constant(1.0 / (hi - lo), lo, hi);
  d.validate();
  return d;
}

QuantileDistribution QuantileDistribution::from_quantile(PiecewisePoly quantile,
                                                         std::optional<PiecewisePoly> density) {
  QuantileDistribution d;
  d.quantile_ = std::move(quantile);
  d.density_ = std::move(density);
  d.validate();
  return d;
}

QuantileDistribution QuantileDistribution::from_density(PiecewisePoly density, std::size_t nodes) {
  if (nodes < 4) nodes = 4;
  const double lo = density.lo(), hi = density.hi();
  const PiecewisePoly cdf = density.antiderivative();

  // Nodes uniform in the state; their cdf values are exact.
  std::vector<double> th, om, slope;
  for (std::size_t k = 0; k <= nodes; ++k) {
    const double w = grid_point(lo, hi, k, nodes);
    const double t = k == nodes ? 1.0 : std::min(cdf(w), 1.0);
    if (!th.empty() && t <= th.back() + 1e-15) {
      // Zero-density stretch: keep the rightmost state for this level.
      om.back() = w;
      continue;
    }
    th.push_back(t);
    om.push_back(w);
    const double f = density(w);
    slope.push_back(f > 0.0 ? 1.0 / f : -1.0);
  }
  if (th.front() != 0.0) th.front() = 0.0;
  th.back() = 1.0;
  const std::size_t n = th.size() - 1;
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "density has no mass");

  std::vector<double> h(n), delta(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = th[i + 1] - th[i];
    delta[i] = (om[i + 1] - om[i]) / h[i];
  }
  // Node slopes: exact inverse density where finite, limited so that the
  // Hermite cubic stays monotone; harmonic-mean estimate otherwise.
  std::vector<double> m(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double dl = i > 0 ? delta[i - 1] : delta[0];
    const double dr = i < n ? delta[i] : delta[n - 1];
    double est;
    if (dl <= 0.0 || dr <= 0.0) {
      est = 0.0;
    } else if (i == 0 || i == n) {
      est = i == 0 ? dr : dl;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
      est = (w1 + w2) / (w1 / dl + w2 / dr);
    }
    const double exact = slope[i];
    m[i] = exact >= 0.0 ? std::min(exact, 3.0 * std::min(dl, dr)) : est;
  }
  std::vector<Coeffs> pieces(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c2 = (3.0 * delta[i] - 2.0 * m[i] - m[i + 1]) / h[i];
    const double c3 = (m[i] + m[i + 1] - 2.0 * delta[i]) / (h[i] * h[i]);
    pieces[i] = Coeffs{om[i], m[i], c2, c3};
  }
  QuantileDistribution d;
  d.quantile_ = PiecewisePoly(std::move(th), std::move(pieces));
  d.density_ = std::move(density);
  d.validate();
  return d;
}

void QuantileDistribution::validate() {
  if (quantile_.empty()) throw Error(ErrorKind::InvalidArgument, "empty quantile function");
  if (std::abs(quantile_.lo()) > 1e-12 || std::abs(quantile_.hi() - 1.0) > 1e-12)
    throw Error(ErrorKind::DomainMismatch, "quantile function must be defined on [0, 1]");
  if (!quantile_.nondecreasing(1e-12, kValidationGrid))
    throw Error(ErrorKind::NonMonotone, "quantile function must be nondecreasing");
  if (!(hi() > lo())) throw Error(ErrorKind::InvalidArgument, "degenerate state distribution");
  if (!density_) return;
  const PiecewisePoly& f = *density_;
  const double tol = 1e-9 * std::max(1.0, hi() - lo());
  if (std::abs(f.lo() - lo()) > tol || std::abs(f.hi() - hi()) > tol)
    throw Error(ErrorKind::DomainMismatch, "density support differs from the quantile range");
  for (std::size_t k = 0; k <= kValidationGrid; ++k) {
    const double w = grid_point(f.lo(), f.hi(), k, kValidationGrid);
    const double v = f(w);
    if (v < -1e-12) throw Error(ErrorKind::InvalidArgument, "density is negative");
    if (v <= 0.0 && k > 0 && k < kValidationGrid)
      warnings_.push_back("density vanishes inside its support");
  }
  if (!f.continuous()) warnings_.push_back("density is discontinuous");
  const double mass = f.integral(f.lo(), f.hi());
  if (std::abs(mass - 1.0) > 1e-10)
    throw Error(ErrorKind::InvalidArgument, "density integrates to " + std::to_string(mass));
  cdf_ = f.antiderivative();
}

bool QuantileDistribution::is_uniform(double tol) const {
  if (!quantile_.continuous()) return false;
  const double slope = hi() - lo();
  const PiecewisePoly d = quantile_.derivative();
  for (std::size_t i = 0; i < d.num_pieces(); ++i) {
    const Coeffs& c = d.pieces()[i];
    if (std::abs(c[0] - slope) > tol * std::max(1.0, slope)) return false;
    for (std::size_t k = 1; k < c.size(); ++k)
      if (std::abs(c[k]) > tol) return false;
  }
  return true;
}

double QuantileDistribution::cdf(double w) const {
  if (w <= lo()) return 0.0;
  if (w >= hi()) return 1.0;
  if (cdf_) return std::clamp((*cdf_)(w), 0.0, 1.0);
  return quantile_.upper_preimage(w);
}

double QuantileDistribution::mode() const {
  if (!density_) throw Error(ErrorKind::MissingDensity, "mode requires a density");
  const PiecewisePoly& f = *density_;
  constexpr std::size_t n = 1 << 14;
  double best = f.lo(), fb = f(f.lo());
  for (std::size_t k = 1; k <= n; ++k) {
    const double w = grid_point(f.lo(), f.hi(), k, n);
    if (const double v = f(w); v > fb) {
      fb = v;
      best = w;
    }
  }
  // Polish inside the bracketing cells through the derivative's sign change.
  const double h = (f.hi() - f.lo()) / static_cast<double>(n);
  const double a = std::max(f.lo(), best - h), b = std::min(f.hi(), best + h);
  const PiecewisePoly df = f.derivative();
  double l = a, r = b;
  if (df(l) > 0.0 && df.left_limit(r) < 0.0) {
    for (int it = 0; it < 200 && r - l > 1e-15; ++it) {
      const double m = 0.5 * (l + r);
      if (df(m) > 0.0) l = m; else r = m;
    }
    return 0.5 * (l + r);
  }
  for (double t : f.breaks())
    if (t >= a && t <= b && std::max(f.left_limit(t), f(t)) >= fb) return t;
  return best;
}

bool QuantileDistribution::unimodal(std::size_t grid) const {
  if (!density_) return false;
  const PiecewisePoly& f = *density_;
  const double gm = mode();
  if (!(gm > f.lo() && gm < f.hi())) return false;
  double prev = f(f.lo());
  for (std::size_t k = 1; k <= grid; ++k) {
    const double w = grid_point(f.lo(), f.hi(), k, grid);
    const double v = k == grid ? f.left_limit(w) : f(w);
    const double wp = grid_point(f.lo(), f.hi(), k - 1, grid);
    if (w <= gm && !(v > prev)) return false;
    if (wp >= gm && !(v < prev)) return false;
    prev = v;
  }
  return true;
}

}  // namespace monopart
