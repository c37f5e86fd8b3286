#include "monopart/equivalence.hpp"

#include <algorithm>
#include <cmath>

#include "monopart/error.hpp"

namespace monopart {

namespace {

Primitive swap_roles(const Primitive& src, Orientation target) {
  if (src.is_tabulated())
    return Primitive::tabulated(src.du_grid().transposed_negated(), src.dv_grid().transposed_negated(),
                                target);
  if (const auto& lf = src.linear_form())
    return make_linear_primitive(lf->b, lf->c, lf->d, target);
  const Marginal& u = src.u();
  const Marginal& v = src.v();
  return Primitive::separable({u.decision, u.state}, {v.decision, v.state}, target);
}

}  // namespace

Primitive delegation_to_persuasion(const Primitive& p) {
  if (p.orientation() != Orientation::Delegation)
    throw Error(ErrorKind::WrongOrientation, "expected a delegation primitive");
  return swap_roles(quantile_reparameterize(p), Orientation::Persuasion);
}

Primitive persuasion_to_delegation(const Primitive& p) {
  if (p.orientation() != Orientation::Persuasion)
    throw Error(ErrorKind::WrongOrientation, "expected a persuasion primitive");
  return swap_roles(quantile_reparameterize(p), Orientation::Delegation);
}

DualityResidual duality_residual(const Primitive& pD, const Primitive& pP, std::size_t n) {
  if (n < 2) n = 2;
  DualityResidual r{0.0, 0.0, n};
  auto node = [n](double lo, double hi, std::size_t k) {
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double td = node(pD.state_lo(), pD.state_hi(), i);
    const double xp = std::clamp(td, pP.decision_lo(), pP.decision_hi());
    for (std::size_t j = 0; j < n; ++j) {
      const double tp = node(pD.decision_lo(), pD.decision_hi(), j);
      const double sp = std::clamp(tp, pP.state_lo(), pP.state_hi());
      r.max_abs_U = std::max(r.max_abs_U, std::abs(pD.dU(td, tp) + pP.dU(sp, xp)));
      r.max_abs_V = std::max(r.max_abs_V, std::abs(pD.dV(td, tp) + pP.dV(sp, xp)));
    }
  }
  return r;
}

Primitive quantile_reparameterize(const Primitive& p) {
  const auto& dist = p.state_dist();
  if (!dist) return p;
  if (p.is_tabulated())
    throw Error(ErrorKind::UnsupportedPrimitive, "tabulated primitives carry no state distribution");
  const PiecewisePoly& q = dist->quantile();
  Primitive out = [&] {
    if (const auto& lf = p.linear_form()) {
      if (p.orientation() == Orientation::Delegation)
        return make_linear_primitive(compose(lf->b, q), lf->c, compose(lf->d, q), p.orientation());
      return make_linear_primitive(lf->b, compose(lf->c, q), lf->d, p.orientation());
    }
    const Marginal& u = p.u();
    const Marginal& v = p.v();
    return Primitive::separable({compose(u.state, q), u.decision}, {compose(v.state, q), v.decision},
                                p.orientation());
  }();
  std::optional<PiecewisePoly> av, au;
  if (p.principal_anchor()) av = compose(*p.principal_anchor(), q);
  if (p.agent_anchor()) au = compose(*p.agent_anchor(), q);
  return out.with_anchors(std::move(av), std::move(au));
}

}  // namespace monopart
