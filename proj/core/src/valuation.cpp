#include "monopart/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "monopart/equivalence.hpp"
#include "monopart/error.hpp"
#include "monopart/numeric.hpp"

namespace monopart {

namespace {

constexpr std::size_t kGaussOrder = 20;

struct Sums {
  double principal = 0.0;
  double agent = 0.0;
};

void check_domain(const MonotoneSet& pi, double lo, double hi, const char* what) {
  const double tol = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (std::abs(pi.lo() - lo) > tol || std::abs(pi.hi() - hi) > tol)
    throw Error(ErrorKind::DomainMismatch, std::string("set must live on the ") + what + " domain");
}

// Gauss-Legendre on each piece between sorted cuts; f returns (principal, agent).
template <class F>
Sums integrate_pair(F f, double a, double b, std::vector<double> cuts) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const auto& rule = numeric::gauss_legendre(kGaussOrder);
  Sums s;
  double prev = a;
  for (double c : cuts) {
    if (c <= prev || c > b) continue;
    const double half = 0.5 * (c - prev), mid = 0.5 * (c + prev);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const auto [pv, av] = f(mid + half * rule.nodes[k]);
      s.principal += half * rule.weights[k] * pv;
      s.agent += half * rule.weights[k] * av;
    }
    prev = c;
  }
  return s;
}

// Composite trapezoid on each piece between cuts, nodes shared out by length.
template <class F>
Sums trapezoid_pair(F f, double a, double b, std::vector<double> cuts, std::size_t n) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  Sums s;
  double prev = a;
  for (double c : cuts) {
    if (c <= prev || c > b) continue;
    const auto m = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (c - prev) / (b - a))));
    const double h = (c - prev) / static_cast<double>(m - 1);
    for (std::size_t k = 0; k < m; ++k) {
      const double w = (k == 0 || k + 1 == m) ? 0.5 * h : h;
      // Panel ends are read from just inside so a switch at a cut is not
      // resolved by the tie-break on both sides.
      const double eps = 1e-10 * (c - prev);
      const double t = k == 0 ? prev + eps : (k + 1 == m ? c - eps : prev + h * static_cast<double>(k));
      const auto [pv, av] = f(t);
      s.principal += w * pv;
      s.agent += w * av;
    }
    prev = c;
  }
  return s;
}

void append_breaks(std::vector<double>& out, const PiecewisePoly& f) {
  out.insert(out.end(), f.breaks().begin(), f.breaks().end());
}

// States where the unconstrained choice crosses a decision-space kink z.
void append_level_preimages(std::vector<double>& out, const Primitive& p,
                            const std::vector<double>& zs) {
  const Marginal& u = p.u();
  for (double z : zs) {
    for (double level : {u.decision.left_limit(z), u.decision.right_limit(z)}) {
      out.push_back(u.state.lower_preimage(level));
      out.push_back(u.state.upper_preimage(level));
    }
  }
}

std::vector<double> decision_kinks(const Primitive& p) {
  std::vector<double> zs;
  append_breaks(zs, p.u().decision);
  append_breaks(zs, p.v().decision);
  return zs;
}

std::size_t component(const MonotoneSet& pi, double x) {
  const auto& iv = pi.intervals();
  auto it = std::upper_bound(iv.begin(), iv.end(), x,
                             [](double v, const Interval& i) { return v < i.lo; });
  return static_cast<std::size_t>(std::distance(iv.begin(), it));
}

Sums delegation_separable(const Primitive& p, const MonotoneSet& pi, TieBreak tb) {
  std::vector<double> cuts;
  append_breaks(cuts, p.u().state);
  append_breaks(cuts, p.v().state);
  std::vector<double> zs = decision_kinks(p);
  const auto bp = pi.boundary_points();
  zs.insert(zs.end(), bp.begin(), bp.end());
  append_level_preimages(cuts, p, zs);
  const auto& iv = pi.intervals();
  for (std::size_t i = 0; i + 1 < iv.size(); ++i)
    cuts.push_back(indifference_state(p, iv[i].hi, iv[i + 1].lo));
  return integrate_pair(
      [&](double t) {
        const double x = best_decision_delegation(p, pi, t, tb);
        return std::pair{p.V(t, x), p.U(t, x)};
      },
      p.state_lo(), p.state_hi(), std::move(cuts));
}

Sums delegation_tabulated(const Primitive& p, const MonotoneSet& pi, TieBreak tb, std::size_t n) {
  const double lo = p.state_lo(), hi = p.state_hi();
  std::vector<double> cuts;
  double prev_t = lo, prev_x = best_decision_delegation(p, pi, lo, tb);
  for (std::size_t k = 1; k < n; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    const double x = best_decision_delegation(p, pi, t, tb);
    if (component(pi, x) != component(pi, prev_x)) {
      auto diff = [&](double s) { return p.U(s, x) - p.U(s, prev_x); };
      if (auto r = numeric::bisect(diff, prev_t, t, 1e-14)) cuts.push_back(r->root);
    }
    prev_t = t;
    prev_x = x;
  }
  return trapezoid_pair(
      [&](double t) {
        const double x = best_decision_delegation(p, pi, t, tb);
        return std::pair{p.V(t, x), p.U(t, x)};
      },
      lo, hi, std::move(cuts), n);
}

// Exact integral over [a, b] of a function that is linear between grid rows.
double row_linear_integral(const std::function<double(double)>& f, double a, double b, std::size_t ns) {
  const double h = 1.0 / static_cast<double>(ns - 1);
  double total = 0.0, pt = a, pv = f(a);
  for (auto k = static_cast<std::size_t>(std::floor(a / h)) + 1; k < ns && static_cast<double>(k) * h < b; ++k) {
    const double t = static_cast<double>(k) * h, v = f(t);
    total += 0.5 * (t - pt) * (pv + v);
    pt = t;
    pv = v;
  }
  return total + 0.5 * (b - pt) * (pv + f(b));
}

Sums persuasion_cell(const Primitive& p, double lo, double hi, bool pooled, TieBreak tb, std::size_t n) {
  if (!(hi > lo)) return {};
  if (pooled) {
    const double x = best_decision_element(p, Element{lo, hi, true}, tb);
    if (p.is_tabulated()) {
      const std::size_t ns = p.du_grid().n_state();
      return {row_linear_integral([&](double t) { return p.V(t, x); }, lo, hi, ns),
              row_linear_integral([&](double t) { return p.U(t, x); }, lo, hi, ns)};
    }
    const double x0 = p.decision_lo(), len = hi - lo;
    return {p.v().state.integral(lo, hi) * (x - x0) - len * p.v_decision_integral()(x),
            p.u().state.integral(lo, hi) * (x - x0) - len * p.u_decision_integral()(x)};
  }
  auto f = [&](double t) {
    const double x = best_decision_element(p, Element{t, t, false}, tb);
    return std::pair{p.V(t, x), p.U(t, x)};
  };
  if (p.is_tabulated()) {
    const double span = p.state_hi() - p.state_lo();
    const auto m = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (hi - lo) / span));
    return trapezoid_pair(f, lo, hi, {}, std::max<std::size_t>(m, 2));
  }
  std::vector<double> cuts;
  append_breaks(cuts, p.u().state);
  append_breaks(cuts, p.v().state);
  std::vector<double> zs = decision_kinks(p);
  zs.push_back(p.decision_lo());
  zs.push_back(p.decision_hi());
  append_level_preimages(cuts, p, zs);
  return integrate_pair(f, lo, hi, std::move(cuts));
}

Sums persuasion(const Primitive& p, const MonotoneSet& pi, TieBreak tb, std::size_t n) {
  Sums s;
  auto add = [&](const Sums& part) {
    s.principal += part.principal;
    s.agent += part.agent;
  };
  for (const Interval& iv : pi.intervals()) add(persuasion_cell(p, iv.lo, iv.hi, false, tb, n));
  for (const Interval& pool : pi.pools()) add(persuasion_cell(p, pool.lo, pool.hi, true, tb, n));
  return s;
}

}  // namespace

Payoffs expected_payoffs(const Primitive& p0, const MonotoneSet& pi, TieBreak tb, std::size_t n) {
  const Primitive p = quantile_reparameterize(p0);
  if (!pi.balanced()) throw Error(ErrorKind::UnbalancedSet, "set must contain both domain endpoints");
  Sums s;
  if (p.orientation() == Orientation::Delegation) {
    check_domain(pi, p.decision_lo(), p.decision_hi(), "decision");
    s = p.is_tabulated() ? delegation_tabulated(p, pi, tb, n) : delegation_separable(p, pi, tb);
  } else {
    check_domain(pi, p.state_lo(), p.state_hi(), "state");
    s = persuasion(p, pi, tb, n);
  }
  Payoffs out{s.principal, s.agent, std::nullopt, std::nullopt};
  if (const auto& a = p.principal_anchor()) out.principal_unnormalized = s.principal + a->integral(a->lo(), a->hi());
  if (const auto& a = p.agent_anchor()) out.agent_unnormalized = s.agent + a->integral(a->lo(), a->hi());
  return out;
}

Payoffs persuasion_cell_payoffs(const Primitive& p, double lo, double hi, bool pooled, TieBreak tb,
                                std::size_t n) {
  if (p.orientation() != Orientation::Persuasion)
    throw Error(ErrorKind::WrongOrientation, "expected a persuasion primitive");
  if (p.state_dist() && !p.state_dist()->is_uniform())
    throw Error(ErrorKind::NonUniformState, "reparameterize the state first");
  const Sums s = persuasion_cell(p, lo, hi, pooled, tb, n);
  return {s.principal, s.agent, std::nullopt, std::nullopt};
}

// ---------------------------------------------------------------------------
// NuFunction

NuFunction::NuFunction(PiecewisePoly nu, Source s) : nu_(std::move(nu)), source_(s) {
  dnu_ = nu_.derivative();
}

NuFunction NuFunction::regulation(const PiecewisePoly& f, double m_hi) {
  if (std::abs(f.lo()) > 1e-12 || std::abs(f.hi() - 1.0) > 1e-12)
    throw Error(ErrorKind::DomainMismatch, "cost density must live on [0, 1]");
  if (m_hi < 1.0) throw Error(ErrorKind::InvalidArgument, "nu domain must reach 1");
  const PiecewisePoly F = f.antiderivative();
  const PiecewisePoly G = (PiecewisePoly::identity(0.0, 1.0) * f).antiderivative();
  // On [1/2, 1]: m F(2m - 1) - G(2m - 1).
  const PiecewisePoly mid = PiecewisePoly::identity(0.5, 1.0) * F.compose_affine(2.0, -1.0) -
                            G.compose_affine(2.0, -1.0);
  std::vector<PiecewisePoly> parts{PiecewisePoly::constant(0.0, 0.0, 0.5), mid};
  if (m_hi > 1.0) parts.push_back(PiecewisePoly({1.0, m_hi}, {Coeffs{1.0 - G(1.0), 1.0}}));
  return NuFunction(PiecewisePoly::concat(parts), Source::Regulation);
}

NuFunction NuFunction::linear_delegation(const PiecewisePoly& d, const PiecewisePoly& f, double m_lo,
                                         double m_hi) {
  if (std::abs(f.lo()) > 1e-12 || std::abs(f.hi() - 1.0) > 1e-12 || std::abs(d.lo()) > 1e-12 ||
      std::abs(d.hi() - 1.0) > 1e-12)
    throw Error(ErrorKind::DomainMismatch, "d and f must live on [0, 1]");
  if (m_lo > 0.0 || m_hi < 1.0) throw Error(ErrorKind::InvalidArgument, "nu domain must cover [0, 1]");
  const PiecewisePoly F = f.antiderivative();
  const PiecewisePoly D = (d * f).antiderivative();
  const PiecewisePoly mid = PiecewisePoly::identity(0.0, 1.0) * F - D;
  std::vector<PiecewisePoly> parts;
  if (m_lo < 0.0) parts.push_back(PiecewisePoly::constant(0.0, m_lo, 0.0));
  parts.push_back(mid);
  if (m_hi > 1.0) parts.push_back(PiecewisePoly({1.0, m_hi}, {Coeffs{mid(1.0), 1.0}}));
  return NuFunction(PiecewisePoly::concat(parts), Source::LinearDelegation);
}

NuFunction NuFunction::direct(PiecewisePoly nu) { return NuFunction(std::move(nu), Source::Direct); }

NuFunction NuFunction::reflected() const {
  return NuFunction(nu_.compose_affine(-1.0, lo() + hi()), source_);
}

NuFunction build_nu(const Primitive& p0) {
  const Primitive p = p0.orientation() == Orientation::Delegation ? delegation_to_persuasion(p0)
                                                                  : quantile_reparameterize(p0);
  if (p.is_tabulated())
    throw Error(ErrorKind::UnsupportedPrimitive, "nu needs a separable primitive");
  const Marginal& u = p.u();
  const Marginal& v = p.v();
  if (!u.state.approx_equal(v.state, 1e-12))
    throw Error(ErrorKind::UnsupportedPrimitive, "principal and agent must weigh states identically");
  if (u.decision.max_degree() > 1)
    throw Error(ErrorKind::UnsupportedPrimitive, "receiver's decision part must be piecewise linear");
  const double m_lo = u.state(u.state.lo()), m_hi = u.state.left_limit(u.state.hi());
  if (!(m_hi > m_lo)) throw Error(ErrorKind::UnsupportedPrimitive, "state part is constant");

  // Receiver's choice as a function of the posterior mean: inverse of the
  // decision part, clamped to the decision domain.
  const PiecewisePoly& b = u.decision;
  std::vector<double> mb{m_lo, m_hi};
  for (double z : b.breaks())
    for (double level : {b.left_limit(z), b.right_limit(z)})
      if (level > m_lo && level < m_hi) mb.push_back(level);
  mb = merge_breaks(mb, {}, 1e-13);
  std::vector<Coeffs> xp;
  for (std::size_t i = 0; i + 1 < mb.size(); ++i) {
    const double l = mb[i], mid = 0.5 * (mb[i] + mb[i + 1]);
    const double x_mid = b.lower_preimage(mid);
    const std::size_t k = b.piece_index(x_mid);
    const Coeffs& c = b.pieces()[k];
    const double slope = c.size() > 1 ? c[1] : 0.0;
    const bool inside = x_mid > b.lo() && x_mid < b.hi() && slope > 0.0;
    if (inside) {
      // b(x) = c0 + slope (x - z_k)  =>  x = z_k + (m - c0) / slope.
      const double zk = b.breaks()[k];
      xp.push_back(Coeffs{zk + (l - c[0]) / slope, 1.0 / slope});
    } else {
      xp.push_back(Coeffs{x_mid});
    }
  }
  const PiecewisePoly xbar(mb, std::move(xp));
  const PiecewisePoly m = PiecewisePoly::identity(m_lo, m_hi);
  const PiecewisePoly nu = m * (xbar + (-p.decision_lo())) - compose(p.v_decision_integral(), xbar);
  return NuFunction(nu, NuFunction::Source::LinearPersuasion);
}

double separated_value(const NuFunction& nu, const PiecewisePoly& c, double a, double b) {
  if (!(b > a)) return 0.0;
  const double tol = 1e-9 * std::max({1.0, std::abs(nu.lo()), std::abs(nu.hi())});
  if (c(a) < nu.lo() - tol || c.left_limit(b) > nu.hi() + tol)
    throw Error(ErrorKind::OutOfDomain, "c maps outside the domain of nu");
  if (c.num_pieces() == 1 && c.pieces()[0].size() == 2 && c.pieces()[0][0] == c.lo() &&
      c.pieces()[0][1] == 1.0)
    return nu.nu().integral(a, b);
  return compose(nu.nu(), c.restrict_to(a, b)).integral(a, b);
}

double pooled_value(const NuFunction& nu, const PiecewisePoly& c, double a, double b) {
  if (!(b > a)) return 0.0;
  return (b - a) * nu(c.integral(a, b) / (b - a));
}

double expected_nu(const MonotoneSet& pi, const NuFunction& nu, const PiecewisePoly& c,
                   const std::optional<QuantileDistribution>& dist) {
  if (dist && !dist->is_uniform()) throw Error(ErrorKind::NonUniformState, "reparameterize the state first");
  if (!pi.balanced()) throw Error(ErrorKind::UnbalancedSet, "set must contain both domain endpoints");
  check_domain(pi, c.lo(), c.hi(), "state");
  double total = 0.0;
  for (const Interval& iv : pi.intervals()) total += separated_value(nu, c, iv.lo, iv.hi);
  for (const Interval& pool : pi.pools()) total += pooled_value(nu, c, pool.lo, pool.hi);
  return total;
}

}  // namespace monopart
