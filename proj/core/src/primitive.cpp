#include "monopart/primitive.hpp"

#include <algorithm>
#include <cmath>

#include "monopart/error.hpp"

namespace monopart {

std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::Delegation ? "delegation" : "persuasion";
}

// ---------------------------------------------------------------------------
// Grid2D

Grid2D::Grid2D(std::size_t n_state, std::size_t n_decision, std::vector<double> values)
    : ns_(n_state), nx_(n_decision), v_(std::move(values)) {
  if (ns_ < 2 || nx_ < 2 || v_.size() != ns_ * nx_)
    throw Error(ErrorKind::InvalidArgument, "grid needs at least 2x2 samples and n_state*n_decision values");
  for (double x : v_)
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "non-finite grid value");
  cum_.assign(ns_ * nx_, 0.0);
  const double h = 1.0 / static_cast<double>(nx_ - 1);
  for (std::size_t i = 0; i < ns_; ++i)
    for (std::size_t j = 1; j < nx_; ++j)
      cum_[i * nx_ + j] = cum_[i * nx_ + j - 1] + 0.5 * h * (at(i, j - 1) + at(i, j));
}

Grid2D Grid2D::sample(const std::function<double(double, double)>& f, std::size_t n) {
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      v[i * n + j] = f(static_cast<double>(i) / static_cast<double>(n - 1),
                       static_cast<double>(j) / static_cast<double>(n - 1));
  return Grid2D(n, n, std::move(v));
}

namespace {

// Cell index and fractional offset of u in [0,1] on an n-node grid.
std::pair<std::size_t, double> locate(double u, std::size_t n) {
  const double s = std::clamp(u, 0.0, 1.0) * static_cast<double>(n - 1);
  auto i = static_cast<std::size_t>(s);
  if (i >= n - 1) i = n - 2;
  return {i, s - static_cast<double>(i)};
}

}  // namespace

double Grid2D::operator()(double t, double x) const {
  const auto [i, wt] = locate(t, ns_);
  const auto [j, wx] = locate(x, nx_);
  const double a = at(i, j) + wx * (at(i, j + 1) - at(i, j));
  const double b = at(i + 1, j) + wx * (at(i + 1, j + 1) - at(i + 1, j));
  return a + wt * (b - a);
}

double Grid2D::row_cum(std::size_t i, double x) const {
  const auto [j, w] = locate(x, nx_);
  const double h = 1.0 / static_cast<double>(nx_ - 1);
  const double v0 = at(i, j), v1 = at(i, j + 1);
  return cum_[i * nx_ + j] + h * (w * v0 + 0.5 * w * w * (v1 - v0));
}

double Grid2D::integral_x(double t, double a, double b) const {
  const auto [i, wt] = locate(t, ns_);
  const double r0 = row_cum(i, b) - row_cum(i, a);
  const double r1 = row_cum(i + 1, b) - row_cum(i + 1, a);
  return r0 + wt * (r1 - r0);
}

double Grid2D::mean_state(double a, double b, double x) const {
  if (b <= a) return (*this)(a, x);
  // The interpolant is piecewise linear in t for fixed x.
  auto col = [&](double t) { return (*this)(t, x); };
  const double h = 1.0 / static_cast<double>(ns_ - 1);
  double total = 0.0, prev_t = a, prev_v = col(a);
  auto k = static_cast<std::size_t>(std::floor(a / h)) + 1;
  for (; static_cast<double>(k) * h < b && k < ns_; ++k) {
    const double t = static_cast<double>(k) * h;
    const double vt = col(t);
    total += 0.5 * (t - prev_t) * (prev_v + vt);
    prev_t = t;
    prev_v = vt;
  }
  const double vb = col(b);
  total += 0.5 * (b - prev_t) * (prev_v + vb);
  return total / (b - a);
}

Grid2D Grid2D::transposed_negated() const {
  std::vector<double> v(ns_ * nx_);
  for (std::size_t i = 0; i < ns_; ++i)
    for (std::size_t j = 0; j < nx_; ++j) v[j * ns_ + i] = -at(i, j);
  return Grid2D(nx_, ns_, std::move(v));
}

// ---------------------------------------------------------------------------
// Primitive

namespace {

bool same_domain(const PiecewisePoly& a, const PiecewisePoly& b) {
  const double tol = 1e-12 * std::max({1.0, std::abs(a.lo()), std::abs(a.hi())});
  return std::abs(a.lo() - b.lo()) <= tol && std::abs(a.hi() - b.hi()) <= tol;
}

constexpr std::size_t kCheckGrid = 64;

}  // namespace

Primitive Primitive::separable(Marginal u, Marginal v, Orientation o,
                               std::optional<QuantileDistribution> dist) {
  Primitive p;
  p.kind_ = Kind::Separable;
  p.orientation_ = o;
  p.u_ = std::move(u);
  p.v_ = std::move(v);
  p.dist_ = std::move(dist);
  p.validate_separable();
  return p;
}

Primitive Primitive::tabulated(Grid2D du, Grid2D dv, Orientation o) {
  Primitive p;
  p.kind_ = Kind::Tabulated;
  p.orientation_ = o;
  p.du_ = std::move(du);
  p.dv_ = std::move(dv);
  p.validate_tabulated();
  return p;
}

void Primitive::validate_separable() {
  const Marginal& u = *u_;
  const Marginal& v = *v_;
  if (!same_domain(u.state, v.state))
    throw Error(ErrorKind::DomainMismatch, "agent and principal state parts have different domains");
  if (!same_domain(u.decision, v.decision))
    throw Error(ErrorKind::DomainMismatch, "agent and principal decision parts have different domains");
  state_lo_ = u.state.lo();
  state_hi_ = u.state.hi();
  decision_lo_ = u.decision.lo();
  decision_hi_ = u.decision.hi();
  if (dist_) {
    const double tol = 1e-9 * std::max({1.0, std::abs(dist_->lo()), std::abs(dist_->hi())});
    if (std::abs(dist_->lo() - state_lo_) > tol || std::abs(dist_->hi() - state_hi_) > tol)
      throw Error(ErrorKind::DomainMismatch, "state functions must live on the support of the state distribution");
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(u.state(state_hi_)));
  if (!u.state.nondecreasing(tol, kCheckGrid))
    throw Error(ErrorKind::NonMonotone, "agent marginal must be nondecreasing in the state");
  if (!u.decision.nondecreasing(1e-12 * std::max(1.0, std::abs(u.decision(decision_hi_))), kCheckGrid))
    throw Error(ErrorKind::NonMonotone, "agent marginal must be nonincreasing in the decision");
  if (u.state.min_derivative(kCheckGrid) <= 0.0 || !u.state.continuous())
    warnings_.push_back("agent marginal is only weakly increasing in the state");
  if (u.decision.min_derivative(kCheckGrid) <= 0.0 || !u.decision.continuous())
    warnings_.push_back("agent marginal is only weakly decreasing in the decision");
  u_int_ = u.decision.antiderivative();
  v_int_ = v.decision.antiderivative();
}

void Primitive::validate_tabulated() {
  const Grid2D& g = *du_;
  for (std::size_t a = 0; a <= kCheckGrid; ++a) {
    for (std::size_t k = 1; k <= kCheckGrid; ++k) {
      const double s = static_cast<double>(a) / kCheckGrid;
      const double t0 = static_cast<double>(k - 1) / kCheckGrid, t1 = static_cast<double>(k) / kCheckGrid;
      if (g(t1, s) < g(t0, s) - 1e-12)
        throw Error(ErrorKind::NonMonotone, "tabulated agent marginal decreases in the state");
      if (g(s, t1) > g(s, t0) + 1e-12)
        throw Error(ErrorKind::NonMonotone, "tabulated agent marginal increases in the decision");
    }
  }
}

const Marginal& Primitive::u() const {
  if (!u_) throw Error(ErrorKind::UnsupportedPrimitive, "tabulated primitive has no separable form");
  return *u_;
}

const Marginal& Primitive::v() const {
  if (!v_) throw Error(ErrorKind::UnsupportedPrimitive, "tabulated primitive has no separable form");
  return *v_;
}

const Grid2D& Primitive::du_grid() const {
  if (!du_) throw Error(ErrorKind::UnsupportedPrimitive, "primitive is not tabulated");
  return *du_;
}

const Grid2D& Primitive::dv_grid() const {
  if (!dv_) throw Error(ErrorKind::UnsupportedPrimitive, "primitive is not tabulated");
  return *dv_;
}

const PiecewisePoly& Primitive::u_decision_integral() const {
  if (!u_) throw Error(ErrorKind::UnsupportedPrimitive, "tabulated primitive has no separable form");
  return u_int_;
}

const PiecewisePoly& Primitive::v_decision_integral() const {
  if (!v_) throw Error(ErrorKind::UnsupportedPrimitive, "tabulated primitive has no separable form");
  return v_int_;
}

double Primitive::dU(double t, double x) const {
  if (du_) return (*du_)(t, x);
  return u_->state(t) - u_->decision(x);
}

double Primitive::dV(double t, double x) const {
  if (dv_) return (*dv_)(t, x);
  return v_->state(t) - v_->decision(x);
}

double Primitive::U(double t, double x) const {
  if (du_) {
    return orientation_ == Orientation::Delegation ? -du_->integral_x(t, x, 1.0)
                                                   : du_->integral_x(t, 0.0, x);
  }
  const double s = u_->state(t);
  if (orientation_ == Orientation::Delegation)
    return -s * (decision_hi_ - x) + (u_int_(decision_hi_) - u_int_(x));
  return s * (x - decision_lo_) - u_int_(x);
}

double Primitive::V(double t, double x) const {
  if (dv_) {
    return orientation_ == Orientation::Delegation ? -dv_->integral_x(t, x, 1.0)
                                                   : dv_->integral_x(t, 0.0, x);
  }
  const double s = v_->state(t);
  if (orientation_ == Orientation::Delegation)
    return -s * (decision_hi_ - x) + (v_int_(decision_hi_) - v_int_(x));
  return s * (x - decision_lo_) - v_int_(x);
}

Primitive Primitive::with_anchors(std::optional<PiecewisePoly> principal,
                                  std::optional<PiecewisePoly> agent) const {
  Primitive p = *this;
  const double tol = 1e-9 * std::max({1.0, std::abs(state_lo_), std::abs(state_hi_)});
  for (const auto* a : {&principal, &agent}) {
    if (*a && (std::abs((*a)->lo() - state_lo_) > tol || std::abs((*a)->hi() - state_hi_) > tol))
      throw Error(ErrorKind::DomainMismatch, "anchor must be a function on the state domain");
  }
  p.anchor_v_ = std::move(principal);
  p.anchor_u_ = std::move(agent);
  return p;
}

Primitive make_linear_primitive(PiecewisePoly b, PiecewisePoly c, PiecewisePoly d, Orientation o,
                                std::optional<QuantileDistribution> dist) {
  // b and c must be strictly increasing; flat stretches only produce warnings.
  for (const auto* f : {&b, &c}) {
    const double tol = 1e-12 * std::max({1.0, std::abs((*f)(f->lo())), std::abs((*f)(f->hi()))});
    if (!f->nondecreasing(tol, 1024))
      throw Error(ErrorKind::NonMonotone, f == &b ? "b must be increasing" : "c must be increasing");
  }
  Primitive p;
  if (o == Orientation::Delegation) {
    if (!same_domain(b, d)) throw Error(ErrorKind::DomainMismatch, "b and d must share the state domain");
    p = Primitive::separable({b, c}, {d, c}, o, std::move(dist));
  } else {
    if (!same_domain(b, d)) throw Error(ErrorKind::DomainMismatch, "b and d must share the decision domain");
    p = Primitive::separable({c, b}, {c, d}, o, std::move(dist));
  }
  if (!d.continuous()) p.warnings_.push_back("d is discontinuous");
  p.kind_ = Primitive::Kind::Linear;
  p.linear_ = LinearForm{std::move(b), std::move(c), std::move(d)};
  return p;
}

}  // namespace monopart
