#include "monopart/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "monopart/equivalence.hpp"
#include "monopart/error.hpp"
#include "monopart/numeric.hpp"

namespace monopart {

std::string_view to_string(Verdict v) noexcept {
  return v == Verdict::Verified ? "verified" : "refuted";
}

namespace {

double mean_of(const PiecewisePoly& c, double a, double b) {
  return b > a ? c.integral(a, b) / (b - a) : c(a);
}

void require_covers(const NuFunction& nu, double a, double b) {
  const double tol = 1e-9 * std::max({1.0, std::abs(nu.lo()), std::abs(nu.hi())});
  if (a < nu.lo() - tol || b > nu.hi() + tol)
    throw Error(ErrorKind::OutOfDomain, "c maps outside the domain of nu");
}

PiecewisePoly nu_piece(const NuFunction& nu, double a, double b) {
  require_covers(nu, a, b);
  return nu.nu().restrict_to(std::max(a, nu.lo()), std::min(b, nu.hi()));
}

double tangent_slope(const NuFunction& nu, double m) {
  return m >= nu.hi() ? nu.slope_left(m) : nu.slope_right(m);
}

// Line through (m0, value) with the given slope, on [a, b].
PiecewisePoly line(double a, double b, double m0, double value, double slope) {
  return PiecewisePoly({a, b}, {Coeffs{value + slope * (a - m0), slope}});
}

PiecewisePoly tangent(const NuFunction& nu, double a, double b, double m) {
  require_covers(nu, m, m);
  return line(a, b, m, nu(m), tangent_slope(nu, m));
}

class Assembler {
 public:
  void add(PiecewisePoly q) {
    if (q.hi() > q.lo()) parts_.push_back(std::move(q));
  }
  PiecewisePoly finish() const {
    if (parts_.empty()) throw Error(ErrorKind::InvalidArgument, "c maps the domain to a single point");
    return PiecewisePoly::concat(parts_);
  }

 private:
  std::vector<PiecewisePoly> parts_;
};

}  // namespace

PiecewisePoly price_function(const MonotoneSet& pi, const NuFunction& nu, const PiecewisePoly& c,
                             const std::optional<QuantileDistribution>& dist) {
  if (dist && !dist->is_uniform()) throw Error(ErrorKind::NonUniformState, "reparameterize the state first");
  if (!pi.balanced()) throw Error(ErrorKind::UnbalancedSet, "set must contain both domain endpoints");
  const double tol = 1e-9 * std::max({1.0, std::abs(c.lo()), std::abs(c.hi())});
  if (std::abs(pi.lo() - c.lo()) > tol || std::abs(pi.hi() - c.hi()) > tol)
    throw Error(ErrorKind::DomainMismatch, "set and c live on different domains");
  const auto& iv = pi.intervals();
  Assembler out;
  for (std::size_t i = 0; i < iv.size(); ++i) {
    const double ml = c(iv[i].lo), mr = c(iv[i].hi);
    if (mr > ml) out.add(nu_piece(nu, ml, mr));
    if (i + 1 < iv.size()) {
      const double a = iv[i].hi, b = iv[i + 1].lo;
      out.add(tangent(nu, c(a), c(b), mean_of(c, a, b)));
    }
  }
  return out.finish();
}

Certificate certify(PiecewisePoly p, const NuFunction& nu, double tol, std::size_t grid) {
  Certificate cert;
  const double lo = p.lo(), hi = p.hi();
  require_covers(nu, lo, hi);
  grid = std::max<std::size_t>(grid, 3);
  std::vector<double> nodes;
  nodes.reserve(grid + p.breaks().size() + nu.nu().breaks().size());
  for (std::size_t k = 0; k < grid; ++k)
    nodes.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid - 1));
  for (double b : p.breaks()) nodes.push_back(b);
  for (double b : nu.nu().breaks())
    if (b > lo && b < hi) nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  double nu_min = INFINITY, nu_max = -INFINITY;
  for (double m : nodes) {
    const double v = nu(m);
    nu_min = std::min(nu_min, v);
    nu_max = std::max(nu_max, v);
  }
  cert.tol = tol * std::max(1.0, nu_max - nu_min);

  const PiecewisePoly dp = p.derivative();
  const PiecewisePoly ddp = dp.derivative();
  double conv = INFINITY, conv_at = lo;
  auto conv_update = [&](double v, double m) {
    if (v < conv) {
      conv = v;
      conv_at = m;
    }
  };
  for (double m : nodes) {
    conv_update(ddp.right_limit(m), m);
    if (m > lo) conv_update(ddp.left_limit(m), m);
  }
  const auto pb = p.breaks();
  for (std::size_t i = 1; i + 1 < pb.size(); ++i) {
    const double m = pb[i];
    conv_update(dp.right_limit(m) - dp.left_limit(m), m);
    conv_update(-std::abs(p.right_limit(m) - p.left_limit(m)), m);
  }

  double gap = INFINITY, gap_at = lo;
  auto gap_update = [&](double v, double m) {
    if (v < gap) {
      gap = v;
      gap_at = m;
    }
  };
  for (double m : nodes) {
    gap_update(p.right_limit(m) - nu.nu().right_limit(m), m);
    if (m > lo) gap_update(p.left_limit(m) - nu.nu().left_limit(m), m);
  }

  cert.convexity_residual = conv;
  cert.dominance_gap = gap;
  const bool convex = conv >= -cert.tol, dominates = gap >= -cert.tol;
  cert.verdict = convex && dominates ? Verdict::Verified : Verdict::Refuted;
  if (!convex) {
    cert.witness = conv_at;
    cert.notes.push_back("price function not convex");
  } else if (!dominates) {
    cert.witness = gap_at;
    cert.notes.push_back("price function dips below nu");
  }
  cert.p_fn = std::move(p);
  return cert;
}

Certificate verify_optimal(const MonotoneSet& pi, const NuFunction& nu, const PiecewisePoly& c,
                           const std::optional<QuantileDistribution>& dist, double tol) {
  return certify(price_function(pi, nu, c, dist), nu, tol);
}

// ---------------------------------------------------------------------------
// Regulation

double censorship_residual(const NuFunction& nu, double t, double theta_bar) {
  const double M = 0.5 * (theta_bar + t);
  return nu(M) - nu(t) - (M - t) * tangent_slope(nu, M);
}

RegulationSolution solve_upper_censorship(const PiecewisePoly& f, double theta_bar) {
  if (!(theta_bar >= 1.0)) throw Error(ErrorKind::InvalidArgument, "theta_bar must be at least 1");
  const QuantileDistribution dist = QuantileDistribution::from_density(f);
  if (!dist.unimodal()) throw Error(ErrorKind::NotUnimodal, "density must rise then fall with an interior mode");
  const double gm = dist.mode();
  NuFunction nu = NuFunction::regulation(f, std::max(2.0, theta_bar));
  auto R = [&](double t) { return censorship_residual(nu, t, theta_bar); };

  double lo = std::max(0.0, 1.0 + gm - theta_bar), hi = 0.5 * (1.0 + gm);
  const double lo0 = lo, hi0 = hi;
  bool widened = false;
  auto brackets = [&](double a, double b) { return R(a) * R(b) <= 0.0; };
  if (!brackets(lo, hi)) {
    bool found = false;
    const double w = hi - lo;
    for (double k = 0.125; k <= 64.0 && !found; k *= 2.0) {
      const double a = std::max(0.0, lo0 - k * w), b = std::min(1.0, hi0 + k * w);
      if (brackets(a, b)) {
        lo = a;
        hi = b;
        found = true;
      }
      if (a == 0.0 && b == 1.0) break;
    }
    if (!found) throw Error(ErrorKind::BracketFailure, "censorship residual keeps its sign");
    widened = true;
  }
  const auto root = numeric::bisect(R, lo, hi, 1e-12, 200);
  if (!root) throw Error(ErrorKind::BracketFailure, "bisection failed");
  const double t = root->root;

  const PiecewisePoly F = f.antiderivative();
  const PiecewisePoly G = (PiecewisePoly::identity(0.0, 1.0) * f).antiderivative();
  auto gain = [&](double a, double b) { return t * (F(b) - F(a)) - (G(b) - G(a)); };
  const double a = std::max(0.0, 2.0 * t - 1.0);
  std::optional<double> rewrite;
  if (theta_bar == 1.0) rewrite = gain(a, t) - 0.5 * (1.0 - t) * (1.0 - t) * f(t);
  else if (theta_bar == 2.0) rewrite = gain(a, 1.0);

  // Regulated price against the cost draw.
  std::vector<PiecewisePoly> parts;
  const double kink = 2.0 * t - 1.0;
  if (kink > 0.0) parts.push_back(PiecewisePoly({0.0, kink}, {Coeffs{0.5, 0.5}}));
  const double stop = theta_bar == 1.0 ? t : 1.0;
  parts.push_back(PiecewisePoly::constant(t, std::max(0.0, kink), stop));
  if (theta_bar == 1.0 && t < 1.0) parts.push_back(PiecewisePoly::constant(1.0, t, 1.0));

  MonotoneSet pi({{0.0, t}, {theta_bar, theta_bar}}, 0.0, theta_bar);
  const double value = expected_nu(pi, nu, PiecewisePoly::identity(0.0, theta_bar));
  return RegulationSolution{.theta_star = t,
                            .theta_bar = theta_bar,
                            .foc_residual = std::abs(R(t)),
                            .foc_rewrite_residual = rewrite ? std::optional(std::abs(*rewrite)) : std::nullopt,
                            .bracket = {lo, hi},
                            .bracket_widened = widened,
                            .mode = gm,
                            .price_fn = PiecewisePoly::concat(parts),
                            .pi = std::move(pi),
                            .value = value,
                            .nu = std::move(nu)};
}

// ---------------------------------------------------------------------------
// Condition checkers

Certificate check_singleton(double x_star, const NuFunction& nu, const PiecewisePoly& c, double tol) {
  const double m0 = c(c.lo()), m1 = c(c.hi()), ms = c(x_star);
  Assembler p;
  if (ms > m0) p.add(PiecewisePoly::constant(0.0, m0, ms));
  if (m1 > ms) p.add(line(ms, m1, 1.0, nu(1.0), 1.0));
  Certificate cert = certify(p.finish(), nu, tol);
  const double third = nu(1.0) + ms - 1.0;
  cert.notes.push_back("nu(1) + c(x*) - 1 = " + std::to_string(third));
  return cert;
}

Certificate check_interval(double x_lo, double x_hi, const NuFunction& nu, const PiecewisePoly& c,
                           double tol) {
  if (x_hi < x_lo) throw Error(ErrorKind::InvalidArgument, "interval ends out of order");
  const double m0 = c(c.lo()), m1 = c(c.hi()), ml = c(x_lo), mh = c(x_hi);
  Assembler p;
  if (ml > m0) p.add(PiecewisePoly::constant(0.0, m0, ml));
  if (mh > ml) p.add(nu_piece(nu, ml, mh));
  if (m1 > mh) p.add(line(mh, m1, 1.0, nu(1.0), 1.0));
  Certificate cert = certify(p.finish(), nu, tol);
  if (ml == 0.0 && nu.slope_right(0.0) < 0.0) cert.notes.push_back("nu'(0+) < 0 at a lower end of 0");
  if (mh == 1.0 && nu.slope_left(1.0) > 1.0) cert.notes.push_back("nu'(1-) > 1 at an upper end of 1");
  return cert;
}

Certificate check_two_interval(double x_lo, double x_hi, const NuFunction& nu, const PiecewisePoly& c,
                               double tol) {
  if (x_hi < x_lo) throw Error(ErrorKind::InvalidArgument, "interval ends out of order");
  const MonotoneSet pi({{c.lo(), x_lo}, {x_hi, c.hi()}}, c.lo(), c.hi());
  Certificate cert = certify(price_function(pi, nu, c), nu, tol);
  cert.notes.push_back("tangency point m* = " + std::to_string(mean_of(c, x_lo, x_hi)));
  return cert;
}

Certificate check_floor(double x0, double x_star, const NuFunction& nu, const PiecewisePoly& c,
                        double tol) {
  if (x_star < x0) throw Error(ErrorKind::InvalidArgument, "floor above the cap");
  const double m0 = c(c.lo()), m1 = c(c.hi()), ms = c(x_star);
  const double m_star = mean_of(c, x0, x_star);
  Assembler p;
  if (ms > m0) p.add(tangent(nu, m0, ms, m_star));
  if (m1 > ms) p.add(nu_piece(nu, ms, m1));
  Certificate cert = certify(p.finish(), nu, tol);
  if (c(x0) > 0.0) cert.notes.push_back("c(x0) > 0: outside the floor form");
  cert.notes.push_back("tangency point m* = " + std::to_string(m_star));
  return cert;
}

// ---------------------------------------------------------------------------
// Bounding interval

BoundingInterval bounding_interval(const Primitive& p0, double z0, std::size_t grid) {
  if (p0.orientation() != Orientation::Delegation)
    throw Error(ErrorKind::WrongOrientation, "expected a delegation primitive");
  const Primitive p = quantile_reparameterize(p0);
  if (p.is_tabulated()) throw Error(ErrorKind::UnsupportedPrimitive, "needs a separable primitive");
  const double D_lo = p.decision_lo(), D_hi = p.decision_hi();
  if (z0 < D_lo || z0 > D_hi) throw Error(ErrorKind::OutOfDomain, "reference decision outside the domain");
  const double t_lo = p.state_lo(), t_hi = p.state_hi();

  // Payoffs are measured against z0 in every state: V0 = 0 and the level
  // normalization cannot inflate Z.
  const double v0 = 0.0;
  auto rel = [&](double t, double x) { return p.V(t, x) - p.V(t, z0); };
  // Affine in the principal's state part, so the sup over states sits at an end.
  auto sup_v = [&](double x) { return std::max(rel(t_lo, x), rel(t_hi, x)); };
  std::vector<double> xs(grid + 1);
  for (std::size_t k = 0; k <= grid; ++k)
    xs[k] = D_lo + (D_hi - D_lo) * static_cast<double>(k) / static_cast<double>(grid);
  std::size_t first = grid + 1, last = 0;
  for (std::size_t k = 0; k <= grid; ++k) {
    if (sup_v(xs[k]) >= v0) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first > grid) throw Error(ErrorKind::InvalidArgument, "reference value unattainable");
  if (first == 0 || last == grid)
    throw Error(ErrorKind::UnboundedV, "principal's payoff does not fall off within the declared domain");
  auto h = [&](double x) { return sup_v(x) - v0; };
  const double z_lo = numeric::bisect(h, xs[first - 1], xs[first], 1e-13)->root;
  const double z_hi = numeric::bisect(h, xs[last], xs[last + 1], 1e-13)->root;

  auto extend = [&](double t, double z, double end) {
    const double level = std::min(p.U(t, z_lo), p.U(t, z_hi));
    auto g = [&](double x) { return p.U(t, x) - level; };
    if (g(end) >= 0.0)
      throw Error(ErrorKind::UnboundedV, "undominated decisions reach the declared domain end");
    return numeric::bisect(g, std::min(z, end), std::max(z, end), 1e-13)->root;
  };
  const double x_lo = extend(t_lo, z_lo, D_lo);
  const double x_hi = extend(t_hi, z_hi, D_hi);

  // Push the ends out until the extreme pool means leave the agent's ideal range.
  const PiecewisePoly& c = p.u().decision;
  const double ideal_lo = p.u().state(t_lo), ideal_hi = p.u().state.left_limit(t_hi);
  const double w = std::max(x_hi - x_lo, 1e-6);
  auto margin = [&](auto mean_ok, double from, double dir, double end) {
    for (double k = 1.0 / 16.0; k <= 1024.0; k *= 2.0) {
      const double y = from + dir * k * w;
      if ((dir < 0 && y < end) || (dir > 0 && y > end)) break;
      if (mean_ok(y)) return y;
    }
    throw Error(ErrorKind::UnboundedV, "declared domain too narrow for the pooling margins");
  };
  const double y_lo = margin([&](double y) { return mean_of(c, y, x_hi) < ideal_lo; }, x_lo, -1.0, D_lo);
  const double y_hi = margin([&](double y) { return mean_of(c, x_lo, y) > ideal_hi; }, x_hi, 1.0, D_hi);
  const auto vb = p.v().state.breaks();
  const double ref = numeric::integrate_piecewise([&](double t) { return p.V(t, z0); }, t_lo, t_hi,
                                                  std::vector<double>(vb.begin(), vb.end())) /
                     (t_hi - t_lo);
  return {y_lo, y_hi, z_lo, z_hi, x_lo, x_hi, ref};
}

}  // namespace monopart
