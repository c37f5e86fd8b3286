#include "monopart/agent.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "monopart/error.hpp"
#include "monopart/numeric.hpp"

namespace monopart {

std::string_view to_string(TieBreak tb) noexcept {
  switch (tb) {
    case TieBreak::PrincipalPreferred: return "principal-preferred";
    case TieBreak::PrincipalWorst: return "principal-worst";
    case TieBreak::Lowest: return "lowest";
  }
  return "unknown";
}

Element partition_element(const MonotoneSet& pi, double t) { return pi.element(t); }

double posterior_mean(const MonotoneSet& pi, double t, const PiecewisePoly& c) {
  const Element e = pi.element(t);
  if (!e.pooled) return c(e.lo);
  return c.integral(e.lo, e.hi) / (e.hi - e.lo);
}

namespace {

constexpr double kTieTol = 1e-12;

struct Candidate {
  double x;
  double agent;
};

// Picks from candidates whose agent value is within tolerance of the best.
// `principal` scores a decision for the tie-break.
template <class Principal>
double resolve(std::vector<Candidate>& cands, TieBreak tb, Principal principal) {
  double best = -INFINITY;
  for (const auto& c : cands) best = std::max(best, c.agent);
  const double tol = kTieTol * std::max(1.0, std::abs(best));
  std::vector<double> ties;
  for (const auto& c : cands)
    if (c.agent >= best - tol) ties.push_back(c.x);
  std::sort(ties.begin(), ties.end());
  if (ties.size() == 1 || tb == TieBreak::Lowest) return ties.front();
  double pick = ties.front(), score = principal(pick);
  for (std::size_t i = 1; i < ties.size(); ++i) {
    const double s = principal(ties[i]);
    const double eps = kTieTol * std::max(1.0, std::abs(score));
    if ((tb == TieBreak::PrincipalPreferred && s > score + eps) ||
        (tb == TieBreak::PrincipalWorst && s < score - eps)) {
      pick = ties[i];
      score = s;
    }
  }
  return pick;
}

// Stationary points of the principal's objective inside a continuum of ties.
void add_principal_critical(std::vector<Candidate>& cands, double a, double b, double agent_value,
                            const std::function<double(double)>& dprincipal) {
  if (!(b > a)) return;
  for (double r : numeric::all_roots(dprincipal, a, b, 64)) cands.push_back({r, agent_value});
}

double delegation_separable(const Primitive& p, const MonotoneSet& pi, double t, TieBreak tb) {
  const Marginal& u = p.u();
  const PiecewisePoly& ui = p.u_decision_integral();
  const double s = u.state(t);
  // The agent's objective s*x - ui(x) is concave; its maximizers form [A, B].
  double A = u.decision.lower_preimage(s), B = u.decision.upper_preimage(s);
  if (B < A) std::swap(A, B);
  auto g = [&](double x) { return s * x - ui(x); };

  std::vector<Candidate> cands;
  std::vector<Interval> overlaps;
  for (const Interval& iv : pi.intervals()) {
    if (iv.hi < A) {
      cands.push_back({iv.hi, g(iv.hi)});
    } else if (iv.lo > B) {
      cands.push_back({iv.lo, g(iv.lo)});
    } else {
      const double l = std::max(iv.lo, A), r = std::min(iv.hi, B);
      cands.push_back({l, g(l)});
      if (r > l) {
        cands.push_back({r, g(r)});
        overlaps.push_back({l, r});
      }
    }
  }
  if (cands.empty()) throw Error(ErrorKind::InvalidArgument, "empty delegation set");
  const Marginal& v = p.v();
  const double vs = v.state(t);
  for (const Interval& ov : overlaps)
    add_principal_critical(cands, ov.lo, ov.hi, g(ov.lo),
                           [&](double x) { return vs - v.decision(x); });
  return resolve(cands, tb, [&](double x) { return p.V(t, x); });
}

double delegation_tabulated(const Primitive& p, const MonotoneSet& pi, double t, TieBreak tb) {
  std::vector<Candidate> cands;
  auto agent = [&](double x) { return p.U(t, x); };
  for (const Interval& iv : pi.intervals()) {
    cands.push_back({iv.lo, agent(iv.lo)});
    if (iv.hi > iv.lo) {
      cands.push_back({iv.hi, agent(iv.hi)});
      const double x = numeric::golden_max(agent, iv.lo, iv.hi, 1e-10);
      cands.push_back({x, agent(x)});
    }
  }
  if (cands.empty()) throw Error(ErrorKind::InvalidArgument, "empty delegation set");
  return resolve(cands, tb, [&](double x) { return p.V(t, x); });
}

double element_separable(const Primitive& p, const Element& e, TieBreak tb) {
  const Marginal& u = p.u();
  const Marginal& v = p.v();
  const double len = e.hi - e.lo;
  const double m = e.pooled ? u.state.integral(e.lo, e.hi) / len : u.state(e.lo);
  const double tol = kTieTol * std::max(1.0, std::abs(m));
  double A = u.decision.lower_preimage(m - tol), B = u.decision.upper_preimage(m + tol);
  if (B < A) std::swap(A, B);
  const double span = p.decision_hi() - p.decision_lo();
  if (B - A <= 1e-9 * span) return u.decision.lower_preimage(m);
  // Flat stretch of the decision part: the receiver is indifferent on [A, B].
  const double mv = e.pooled ? v.state.integral(e.lo, e.hi) / len : v.state(e.lo);
  const PiecewisePoly& vi = p.v_decision_integral();
  std::vector<Candidate> cands{{A, 0.0}, {B, 0.0}};
  add_principal_critical(cands, A, B, 0.0, [&](double x) { return mv - v.decision(x); });
  return resolve(cands, tb, [&](double x) { return mv * x - vi(x); });
}

double element_tabulated(const Primitive& p, const Element& e) {
  const Grid2D& g = p.du_grid();
  auto h = [&](double x) { return e.pooled ? g.mean_state(e.lo, e.hi, x) : g(e.lo, x); };
  if (h(0.0) <= 0.0) return 0.0;
  if (h(1.0) >= 0.0) return 1.0;
  return numeric::bisect(h, 0.0, 1.0, 1e-14)->root;
}

}  // namespace

double best_decision_delegation(const Primitive& p, const MonotoneSet& pi, double t, TieBreak tb) {
  if (p.orientation() != Orientation::Delegation)
    throw Error(ErrorKind::WrongOrientation, "expected a delegation primitive");
  if (t < p.state_lo() - 1e-12 || t > p.state_hi() + 1e-12)
    throw Error(ErrorKind::OutOfDomain, "state outside the domain");
  t = std::clamp(t, p.state_lo(), p.state_hi());
  return p.is_tabulated() ? delegation_tabulated(p, pi, t, tb) : delegation_separable(p, pi, t, tb);
}

double best_decision_element(const Primitive& p, const Element& e, TieBreak tb) {
  if (p.orientation() != Orientation::Persuasion)
    throw Error(ErrorKind::WrongOrientation, "expected a persuasion primitive");
  return p.is_tabulated() ? element_tabulated(p, e) : element_separable(p, e, tb);
}

double best_decision_persuasion(const Primitive& p, const MonotoneSet& pi, double t, TieBreak tb) {
  if (p.orientation() != Orientation::Persuasion)
    throw Error(ErrorKind::WrongOrientation, "expected a persuasion primitive");
  return best_decision_element(p, pi.element(t), tb);
}

double indifference_state(const Primitive& p, double x1, double x2) {
  if (x1 == x2) throw Error(ErrorKind::InvalidArgument, "indifference needs two distinct decisions");
  if (x1 > x2) std::swap(x1, x2);
  if (!p.is_tabulated()) {
    const PiecewisePoly& ui = p.u_decision_integral();
    const double level = (ui(x2) - ui(x1)) / (x2 - x1);
    return p.u().state.lower_preimage(level);
  }
  // U(t, x2) - U(t, x1) is nondecreasing in t.
  auto diff = [&](double t) { return p.U(t, x2) - p.U(t, x1); };
  const double lo = p.state_lo(), hi = p.state_hi();
  if (diff(lo) >= 0.0) return lo;
  if (diff(hi) <= 0.0) return hi;
  return numeric::bisect(diff, lo, hi, 1e-14)->root;
}

}  // namespace monopart
