#include "monopart/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "monopart/error.hpp"

namespace monopart {

namespace poly {

double eval(std::span<const double> c, double t) noexcept {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * t + *it;
  return r;
}

Coeffs derivative(std::span<const double> c) {
  if (c.size() <= 1) return {0.0};
  Coeffs d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
  return d;
}

Coeffs antiderivative(std::span<const double> c) {
  Coeffs r(c.size() + 1, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) r[i + 1] = c[i] / static_cast<double>(i + 1);
  return r;
}

Coeffs add(std::span<const double> a, std::span<const double> b) {
  Coeffs r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

Coeffs sub(std::span<const double> a, std::span<const double> b) {
  Coeffs r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return r;
}

Coeffs mul(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {0.0};
  Coeffs r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Coeffs scale(std::span<const double> a, double s) {
  Coeffs r(a.begin(), a.end());
  for (auto& v : r) v *= s;
  return r;
}

Coeffs shift_scale(std::span<const double> p, double a, double k) {
  const Coeffs lin{k, a};
  Coeffs r{0.0};
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    r = mul(r, lin);
    r[0] += *it;
  }
  trim(r);
  return r;
}

Coeffs compose(std::span<const double> outer, std::span<const double> inner) {
  Coeffs r{0.0};
  for (auto it = outer.rbegin(); it != outer.rend(); ++it) {
    r = mul(r, inner);
    r[0] += *it;
  }
  trim(r);
  return r;
}

void trim(Coeffs& c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  if (c.empty()) c.push_back(0.0);
}

std::size_t degree(std::span<const double> c) noexcept {
  std::size_t d = c.empty() ? 0 : c.size() - 1;
  while (d > 0 && c[d] == 0.0) --d;
  return d;
}

}  // namespace poly

namespace {

double domain_scale(std::span<const double> breaks) {
  return std::max({1.0, std::abs(breaks.front()), std::abs(breaks.back())});
}

}  // namespace

PiecewisePoly::PiecewisePoly(std::vector<double> breaks, std::vector<Coeffs> pieces)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
  if (breaks_.size() < 2 || pieces_.size() != breaks_.size() - 1)
    throw Error(ErrorKind::InvalidArgument,
                "piecewise polynomial needs n+1 breakpoints for n >= 1 pieces");
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    if (!(breaks_[i] < breaks_[i + 1]) || !std::isfinite(breaks_[i]) ||
        !std::isfinite(breaks_[i + 1]))
      throw Error(ErrorKind::InvalidArgument, "breakpoints must be finite and strictly increasing");
  }
  double scale = 1.0;
  for (auto& c : pieces_) {
    if (c.empty()) c.push_back(0.0);
    for (double v : c) {
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
      scale = std::max(scale, std::abs(v));
    }
  }
  continuous_ = max_jump() <= 1e-12 * scale;
}

PiecewisePoly PiecewisePoly::constant(double value, double lo, double hi) {
  return PiecewisePoly({lo, hi}, {Coeffs{value}});
}

PiecewisePoly PiecewisePoly::from_global(std::span<const double> global, double lo, double hi) {
  return PiecewisePoly({lo, hi}, {poly::shift_scale(global, 1.0, lo)});
}

PiecewisePoly PiecewisePoly::identity(double lo, double hi) {
  return PiecewisePoly({lo, hi}, {Coeffs{lo, 1.0}});
}

PiecewisePoly PiecewisePoly::concat(std::span<const PiecewisePoly> parts) {
  std::vector<double> breaks;
  std::vector<Coeffs> pieces;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (breaks.empty()) {
      breaks.push_back(p.lo());
    } else if (std::abs(breaks.back() - p.lo()) > 1e-12 * domain_scale(p.breaks_)) {
      throw Error(ErrorKind::DomainMismatch, "concatenated pieces are not adjacent");
    }
    for (std::size_t i = 0; i < p.num_pieces(); ++i) {
      // Skip slivers created by round-off at the junctions.
      if (p.breaks_[i + 1] <= breaks.back()) continue;
      breaks.push_back(p.breaks_[i + 1]);
      const double offset = breaks[breaks.size() - 2] - p.breaks_[i];
      pieces.push_back(offset == 0.0 ? p.pieces_[i] : poly::shift_scale(p.pieces_[i], 1.0, offset));
    }
  }
  return PiecewisePoly(std::move(breaks), std::move(pieces));
}

std::size_t PiecewisePoly::max_degree() const noexcept {
  std::size_t d = 0;
  for (const auto& c : pieces_) d = std::max(d, poly::degree(c));
  return d;
}

double PiecewisePoly::clamp_domain(double t) const {
  const double slack = kDomainSlack * domain_scale(breaks_);
  if (!(t >= lo() - slack && t <= hi() + slack))
    throw Error(ErrorKind::OutOfDomain, "argument " + std::to_string(t) + " outside [" +
                                            std::to_string(lo()) + ", " + std::to_string(hi()) + "]");
  return std::clamp(t, lo(), hi());
}

std::size_t PiecewisePoly::piece_index(double t) const {
  t = clamp_domain(t);
  if (t >= breaks_.back()) return pieces_.size() - 1;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(breaks_.begin(), it)) - 1;
  return std::min(idx, pieces_.size() - 1);
}

double PiecewisePoly::eval_piece(std::size_t i, double t) const {
  return poly::eval(pieces_[i], t - breaks_[i]);
}

double PiecewisePoly::operator()(double t) const {
  t = clamp_domain(t);
  return eval_piece(piece_index(t), t);
}

double PiecewisePoly::right_limit(double t) const { return (*this)(t); }

double PiecewisePoly::left_limit(double t) const {
  t = clamp_domain(t);
  if (t <= breaks_.front()) return eval_piece(0, t);
  auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(breaks_.begin(), it)) - 1;
  return eval_piece(std::min(idx, pieces_.size() - 1), t);
}

PiecewisePoly PiecewisePoly::derivative() const {
  std::vector<Coeffs> d;
  d.reserve(pieces_.size());
  for (const auto& c : pieces_) d.push_back(poly::derivative(c));
  return PiecewisePoly(breaks_, std::move(d));
}

PiecewisePoly PiecewisePoly::antiderivative() const {
  std::vector<Coeffs> r;
  r.reserve(pieces_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    Coeffs a = poly::antiderivative(pieces_[i]);
    a[0] = acc;
    acc = poly::eval(a, breaks_[i + 1] - breaks_[i]);
    r.push_back(std::move(a));
  }
  return PiecewisePoly(breaks_, std::move(r));
}

double PiecewisePoly::integral(double a, double b) const {
  if (a == b) return 0.0;
  if (a > b) return -integral(b, a);
  a = clamp_domain(a);
  b = clamp_domain(b);
  double total = 0.0;
  for (std::size_t i = piece_index(a); i < pieces_.size(); ++i) {
    const double l = std::max(a, breaks_[i]);
    const double r = std::min(b, breaks_[i + 1]);
    if (r > l) {
      const Coeffs anti = poly::antiderivative(pieces_[i]);
      total += poly::eval(anti, r - breaks_[i]) - poly::eval(anti, l - breaks_[i]);
    }
    if (breaks_[i + 1] >= b) break;
  }
  return total;
}

PiecewisePoly PiecewisePoly::compose_affine(double alpha, double beta) const {
  if (alpha == 0.0 || !std::isfinite(alpha) || !std::isfinite(beta))
    throw Error(ErrorKind::InvalidArgument, "affine composition needs a finite nonzero slope");
  const std::size_t n = pieces_.size();
  std::vector<double> nb(n + 1);
  std::vector<Coeffs> np(n);
  if (alpha > 0.0) {
    for (std::size_t i = 0; i <= n; ++i) nb[i] = (breaks_[i] - beta) / alpha;
    for (std::size_t i = 0; i < n; ++i) np[i] = poly::shift_scale(pieces_[i], alpha, 0.0);
  } else {
    for (std::size_t j = 0; j <= n; ++j) nb[j] = (breaks_[n - j] - beta) / alpha;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i = n - 1 - j;
      np[j] = poly::shift_scale(pieces_[i], alpha, breaks_[i + 1] - breaks_[i]);
    }
  }
  return PiecewisePoly(std::move(nb), std::move(np));
}

PiecewisePoly PiecewisePoly::refine(std::span<const double> extra_breaks) const {
  std::vector<double> nb = merge_breaks(breaks_, extra_breaks);
  nb.erase(std::remove_if(nb.begin(), nb.end(), [&](double t) { return t < lo() || t > hi(); }),
           nb.end());
  if (nb.front() != lo()) nb.insert(nb.begin(), lo());
  if (nb.back() != hi()) nb.push_back(hi());
  std::vector<Coeffs> np;
  np.reserve(nb.size() - 1);
  for (std::size_t j = 0; j + 1 < nb.size(); ++j) {
    const std::size_t i = piece_index(0.5 * (nb[j] + nb[j + 1]));
    const double offset = nb[j] - breaks_[i];
    np.push_back(offset == 0.0 ? pieces_[i] : poly::shift_scale(pieces_[i], 1.0, offset));
  }
  return PiecewisePoly(std::move(nb), std::move(np));
}

PiecewisePoly PiecewisePoly::restrict_to(double a, double b) const {
  a = clamp_domain(a);
  b = clamp_domain(b);
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "restriction interval is empty");
  const double cuts[2] = {a, b};
  const PiecewisePoly r = refine(cuts);
  std::vector<double> nb;
  std::vector<Coeffs> np;
  for (std::size_t i = 0; i < r.num_pieces(); ++i) {
    if (r.breaks_[i] < a || r.breaks_[i + 1] > b) continue;
    if (nb.empty()) nb.push_back(r.breaks_[i]);
    nb.push_back(r.breaks_[i + 1]);
    np.push_back(r.pieces_[i]);
  }
  return PiecewisePoly(std::move(nb), std::move(np));
}

namespace {

template <class Op>
PiecewisePoly combine(const PiecewisePoly& a, const PiecewisePoly& b, Op op) {
  const double tol = 1e-12 * std::max({1.0, std::abs(a.lo()), std::abs(a.hi())});
  if (std::abs(a.lo() - b.lo()) > tol || std::abs(a.hi() - b.hi()) > tol)
    throw Error(ErrorKind::DomainMismatch, "arithmetic on functions with different domains");
  const std::vector<double> nb = merge_breaks(a.breaks(), b.breaks());
  const PiecewisePoly ra = a.refine(nb);
  const PiecewisePoly rb = b.refine(ra.breaks());
  std::vector<Coeffs> np;
  np.reserve(ra.num_pieces());
  for (std::size_t i = 0; i < ra.num_pieces(); ++i) {
    Coeffs c = op(ra.pieces()[i], rb.pieces()[i]);
    poly::trim(c);
    np.push_back(std::move(c));
  }
  return PiecewisePoly(std::vector<double>(ra.breaks().begin(), ra.breaks().end()), std::move(np));
}

}  // namespace

PiecewisePoly PiecewisePoly::operator+(const PiecewisePoly& o) const {
  return combine(*this, o, [](const Coeffs& x, const Coeffs& y) { return poly::add(x, y); });
}

PiecewisePoly PiecewisePoly::operator-(const PiecewisePoly& o) const {
  return combine(*this, o, [](const Coeffs& x, const Coeffs& y) { return poly::sub(x, y); });
}

PiecewisePoly PiecewisePoly::operator*(const PiecewisePoly& o) const {
  return combine(*this, o, [](const Coeffs& x, const Coeffs& y) { return poly::mul(x, y); });
}

PiecewisePoly PiecewisePoly::operator*(double s) const {
  std::vector<Coeffs> np;
  np.reserve(pieces_.size());
  for (const auto& c : pieces_) np.push_back(poly::scale(c, s));
  return PiecewisePoly(breaks_, std::move(np));
}

PiecewisePoly PiecewisePoly::operator+(double s) const {
  std::vector<Coeffs> np = pieces_;
  for (auto& c : np) c[0] += s;
  return PiecewisePoly(breaks_, std::move(np));
}

namespace {

// First t in [0, h] with q(t) >= y, given q(0) < y <= q(h) on a nondecreasing piece.
double first_reach(const Coeffs& q, double h, double y) {
  if (q.size() == 2 && q[1] > 0.0) return std::clamp((y - q[0]) / q[1], 0.0, h);
  double a = 0.0, b = h;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (poly::eval(q, m) >= y) b = m; else a = m;
  }
  return b;
}

// Last t in [0, h] with q(t) <= y, given q(0) <= y < q(h).
double last_below(const Coeffs& q, double h, double y) {
  if (q.size() == 2 && q[1] > 0.0) return std::clamp((y - q[0]) / q[1], 0.0, h);
  double a = 0.0, b = h;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (poly::eval(q, m) <= y) a = m; else b = m;
  }
  return a;
}

}  // namespace

double PiecewisePoly::lower_preimage(double y) const {
  const std::size_t n = pieces_.size();
  auto start = [&](std::size_t i) { return poly::eval(pieces_[i], 0.0); };
  auto end = [&](std::size_t i) { return poly::eval(pieces_[i], breaks_[i + 1] - breaks_[i]); };
  if (start(0) >= y) return lo();
  if (end(n - 1) < y) return hi();
  // Smallest piece whose right-end value reaches y.
  std::size_t a = 0, b = n - 1;
  while (a < b) {
    const std::size_t m = (a + b) / 2;
    if (end(m) >= y) b = m; else a = m + 1;
  }
  if (start(a) >= y) return breaks_[a];
  return breaks_[a] + first_reach(pieces_[a], breaks_[a + 1] - breaks_[a], y);
}

double PiecewisePoly::upper_preimage(double y) const {
  const std::size_t n = pieces_.size();
  auto start = [&](std::size_t i) { return poly::eval(pieces_[i], 0.0); };
  auto end = [&](std::size_t i) { return poly::eval(pieces_[i], breaks_[i + 1] - breaks_[i]); };
  if (end(n - 1) <= y) return hi();
  if (start(0) > y) return lo();
  // Largest piece whose left-end value stays at or below y.
  std::size_t a = 0, b = n - 1;
  while (a < b) {
    const std::size_t m = (a + b + 1) / 2;
    if (start(m) <= y) a = m; else b = m - 1;
  }
  if (end(a) <= y) return breaks_[a + 1];
  return breaks_[a] + last_below(pieces_[a], breaks_[a + 1] - breaks_[a], y);
}

bool PiecewisePoly::nondecreasing(double tol, std::size_t grid) const {
  std::vector<double> ts;
  ts.reserve(grid + 2 * breaks_.size());
  for (std::size_t k = 0; k <= grid; ++k)
    ts.push_back(lo() + (hi() - lo()) * static_cast<double>(k) / static_cast<double>(grid));
  ts.insert(ts.end(), breaks_.begin(), breaks_.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : ts) {
    const double l = left_limit(t), r = right_limit(t);
    if (l < prev - tol || r < l - tol) return false;
    prev = r;
  }
  return true;
}

double PiecewisePoly::min_derivative(std::size_t grid) const {
  const PiecewisePoly d = derivative();
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= grid; ++k) {
    const double t = lo() + (hi() - lo()) * static_cast<double>(k) / static_cast<double>(grid);
    m = std::min({m, d.left_limit(t), d.right_limit(t)});
  }
  for (double t : breaks_) m = std::min({m, d.left_limit(t), d.right_limit(t)});
  return m;
}

double PiecewisePoly::max_jump() const {
  double j = 0.0;
  for (std::size_t i = 1; i + 1 < breaks_.size(); ++i) {
    const double l = poly::eval(pieces_[i - 1], breaks_[i] - breaks_[i - 1]);
    const double r = poly::eval(pieces_[i], 0.0);
    j = std::max(j, std::abs(l - r));
  }
  return j;
}

bool PiecewisePoly::approx_equal(const PiecewisePoly& o, double tol) const {
  if (std::abs(lo() - o.lo()) > tol || std::abs(hi() - o.hi()) > tol) return false;
  const std::vector<double> nb = merge_breaks(breaks_, o.breaks_);
  for (std::size_t i = 0; i + 1 < nb.size(); ++i) {
    for (int k = 0; k <= 8; ++k) {
      const double t = nb[i] + (nb[i + 1] - nb[i]) * k / 8.0;
      const double a = k == 8 ? left_limit(t) : right_limit(t);
      const double b = k == 8 ? o.left_limit(t) : o.right_limit(t);
      if (std::abs(a - b) > tol) return false;
    }
  }
  return true;
}

std::vector<double> merge_breaks(std::span<const double> a, std::span<const double> b, double tol) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double t : all) {
    const double s = tol * std::max(1.0, std::abs(t));
    if (out.empty() || t - out.back() > s) out.push_back(t);
  }
  return out;
}

PiecewisePoly compose(const PiecewisePoly& outer, const PiecewisePoly& inner) {
  std::vector<double> nb{inner.lo()};
  std::vector<Coeffs> np;
  const auto ob = outer.breaks();
  for (std::size_t i = 0; i < inner.num_pieces(); ++i) {
    const double a = inner.breaks()[i], b = inner.breaks()[i + 1];
    const Coeffs& q = inner.pieces()[i];
    const double qa = poly::eval(q, 0.0), qb = poly::eval(q, b - a);
    if (qb < qa - 1e-12 * std::max(1.0, std::abs(qa)))
      throw Error(ErrorKind::NonMonotone, "compose() requires a nondecreasing inner function");
    // Pull back outer breakpoints lying strictly inside (qa, qb).
    std::vector<double> cuts{a};
    for (double o : ob) {
      if (!(o > qa && o < qb)) continue;
      double lo = 0.0, hi = b - a;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        if (poly::eval(q, m) >= o) hi = m; else lo = m;
      }
      const double t = a + hi;
      if (t > cuts.back() && t < b) cuts.push_back(t);
    }
    cuts.push_back(b);
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const double l = cuts[j], r = cuts[j + 1];
      const Coeffs qs = poly::shift_scale(q, 1.0, l - a);
      const double mid_val = poly::eval(q, 0.5 * (l + r) - a);
      const std::size_t k = outer.piece_index(std::clamp(mid_val, outer.lo(), outer.hi()));
      Coeffs local = qs;
      local[0] -= ob[k];
      np.push_back(poly::compose(outer.pieces()[k], local));
      nb.push_back(r);
    }
  }
  return PiecewisePoly(std::move(nb), std::move(np));
}

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonMonotone: return "NonMonotone";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::WrongOrientation: return "WrongOrientation";
    case ErrorKind::UnbalancedSet: return "UnbalancedSet";
    case ErrorKind::MissingDensity: return "MissingDensity";
    case ErrorKind::NotUnimodal: return "NotUnimodal";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::UnsupportedShape: return "UnsupportedShape";
    case ErrorKind::UnsupportedPrimitive: return "UnsupportedPrimitive";
    case ErrorKind::UnboundedV: return "UnboundedV";
    case ErrorKind::TooManyCells: return "TooManyCells";
    case ErrorKind::NonUniformState: return "NonUniformState";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidScenario: return "InvalidScenario";
  }
  return "Unknown";
}

}  // namespace monopart
