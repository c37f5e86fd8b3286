#include "monopart/shape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "monopart/error.hpp"
#include "monopart/numeric.hpp"

namespace monopart {

std::string_view to_string(Shape s) noexcept {
  switch (s) {
    case Shape::Convex: return "convex";
    case Shape::Concave: return "concave";
    case Shape::ConvexConcave: return "convex-concave";
    case Shape::ConcaveConvex: return "concave-convex";
  }
  return "unknown";
}

CurvatureProfile curvature_profile(const NuFunction& nu, double a, double b, std::size_t n) {
  if (!(b > a) || n < 2) throw Error(ErrorKind::InvalidArgument, "empty curvature range");
  CurvatureProfile prof{{}, {}, a, b, n};
  const double h = (b - a) / static_cast<double>(n);
  std::vector<double> v(n + 1);
  double vmin = INFINITY, vmax = -INFINITY;
  for (std::size_t i = 0; i <= n; ++i) {
    v[i] = nu(i == n ? b : a + h * static_cast<double>(i));
    vmin = std::min(vmin, v[i]);
    vmax = std::max(vmax, v[i]);
  }
  const double zero = 1e-12 * std::max(1.0, vmax - vmin);
  int current = 0;
  double last_node = a;
  for (std::size_t i = 1; i < n; ++i) {
    const double d2 = v[i - 1] - 2.0 * v[i] + v[i + 1];
    const int s = d2 > zero ? 1 : (d2 < -zero ? -1 : 0);
    const double m = a + h * static_cast<double>(i);
    if (s == 0) continue;
    if (s != current) {
      if (current != 0) prof.changes.push_back(0.5 * (last_node + m));
      prof.signs.push_back(s);
      current = s;
    }
    last_node = m;
  }
  return prof;
}

namespace {

constexpr double kSignTol = 1e-12;

enum class Block { Sep, Pool };

struct Template {
  const char* label;
  std::vector<Block> blocks;
};

using B = Block;

const Template kTemplates[] = {
    {"1a", {B::Sep}},
    {"1b", {B::Sep, B::Pool}},
    {"1c", {B::Pool, B::Sep}},
    {"1d", {B::Pool, B::Sep, B::Pool}},
    {"2a", {B::Pool, B::Pool, B::Pool}},
    {"2b", {B::Pool, B::Pool}},
    {"3b", {B::Sep, B::Pool, B::Pool}},
    {"3d", {B::Pool, B::Sep, B::Pool, B::Pool}},
    {"4b", {B::Pool, B::Pool, B::Sep}},
    {"4d", {B::Pool, B::Pool, B::Sep, B::Pool}},
};

const Template& find_template(std::string_view label) {
  // Cases sharing a block layout with an earlier one.
  static const std::pair<std::string_view, std::string_view> alias[] = {
      {"2c", "2b"}, {"3a", "1b"}, {"3c", "1d"}, {"4a", "1c"}, {"4c", "1d"}};
  for (const auto& [from, to] : alias)
    if (label == from) label = to;
  for (const Template& t : kTemplates)
    if (label == t.label) return t;
  throw Error(ErrorKind::InvalidArgument, "unknown case");
}

int sign_of(double s) { return s > kSignTol ? 1 : (s < -kSignTol ? -1 : 0); }

std::string dispatch(Shape shape, double s0, double s1) {
  const int a = sign_of(s0), b = sign_of(s1);
  switch (shape) {
    case Shape::Convex:
      if (a >= 0) return b <= 0 ? "1a" : "1b";
      return b <= 0 ? "1c" : "1d";
    case Shape::Concave:
      if (a > 0 && b < 0) return "2a";
      if (a <= 0) return "2b";
      return "2c";
    case Shape::ConvexConcave:
      if (a >= 0) return b >= 0 ? "3a" : "3b";
      return b >= 0 ? "3c" : "3d";
    case Shape::ConcaveConvex:
      if (a <= 0) return b >= 0 ? "4a" : "4c";
      return b >= 0 ? "4b" : "4d";
  }
  return "1a";
}

double mean_of(const PiecewisePoly& c, double a, double b) {
  return b > a ? c.integral(a, b) / (b - a) : c(a);
}

struct Candidate {
  const char* layout;
  std::vector<double> z;
  MonotoneSet pi;
  double value;
  Certificate cert;
};

class TemplateSolver {
 public:
  TemplateSolver(const NuFunction& nu, const PiecewisePoly& c, const Template& t)
      : nu_(nu), c_(c), layout_(t.label), blocks_(t.blocks), Y0_(c.lo()), Y1_(c.hi()) {}

  std::vector<Candidate> solve() {
    const std::size_t K = blocks_.size();
    std::vector<std::vector<std::vector<double>>> comp_roots;  // per component, list of value tuples
    std::vector<std::vector<std::size_t>> comps;
    for (std::size_t j = 1; j < K; ++j) {
      if (!comps.empty() && comps.back().back() == j - 1 && blocks_[j - 1] == Block::Pool)
        comps.back().push_back(j);
      else
        comps.push_back({j});
    }
    for (const auto& comp : comps) {
      if (comp.size() > 2) throw Error(ErrorKind::UnsupportedShape, "template too deep");
      comp_roots.push_back(comp.size() == 1 ? solve_single(comp[0]) : solve_pair(comp[0]));
    }
    // Cartesian product of component roots.
    std::vector<Candidate> out;
    std::vector<double> z(K + 1, 0.0);
    z.front() = Y0_;
    z.back() = Y1_;
    std::function<void(std::size_t)> rec = [&](std::size_t ci) {
      if (ci == comps.size()) {
        if (auto cand = assemble(z)) out.push_back(std::move(*cand));
        return;
      }
      for (const auto& tuple : comp_roots[ci]) {
        for (std::size_t k = 0; k < comps[ci].size(); ++k) z[comps[ci][k]] = tuple[k];
        rec(ci + 1);
      }
    };
    rec(0);
    return out;
  }

 private:
  const NuFunction& nu_;
  const PiecewisePoly& c_;
  const char* layout_;
  std::vector<Block> blocks_;
  double Y0_, Y1_;

  double slope_at(double m) const { return m >= nu_.hi() ? nu_.slope_left(m) : nu_.slope_right(m); }

  // p of block j (between zl and zr) evaluated at m.
  double block_value(std::size_t j, double zl, double zr, double m) const {
    if (blocks_[j] == Block::Sep) return nu_(m);
    const double mean = mean_of(c_, zl, zr);
    return nu_(mean) + slope_at(mean) * (m - mean);
  }

  // Continuity of p at z_j given its neighbours.
  double residual(std::size_t j, double zl, double z, double zr) const {
    const double m = c_(z);
    return block_value(j - 1, zl, z, m) - block_value(j, z, zr, m);
  }

  std::vector<double> roots_in(const std::function<double(double)>& f, double lo, double hi,
                               std::size_t samples) const {
    if (!(hi > lo)) return {};
    return numeric::all_roots(f, lo, hi, samples, 1e-13 * std::max(1.0, Y1_ - Y0_));
  }

  std::vector<std::vector<double>> solve_single(std::size_t j) const {
    // A pooled neighbour of a lone unknown is bounded by a domain end.
    auto f = [&](double z) { return residual(j, Y0_, z, Y1_); };
    std::vector<std::vector<double>> out;
    for (double r : roots_in(f, Y0_, Y1_, 256)) out.push_back({r});
    if (out.empty()) {
      out.push_back({Y0_});
      out.push_back({Y1_});
    }
    return out;
  }

  // Unknowns z_j < z_{j+1} joined by the pool block j.
  std::vector<std::vector<double>> solve_pair(std::size_t j) const {
    auto r_left = [&](double a, double b) { return residual(j, Y0_, a, b); };
    auto r_right = [&](double a, double b) { return residual(j + 1, a, b, Y1_); };
    auto inner = [&](double a) {
      return roots_in([&](double b) { return r_right(a, b); }, a, Y1_, 128);
    };
    const std::size_t N = 256;
    std::vector<double> zs(N + 1);
    std::vector<std::vector<double>> inners(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
      zs[i] = Y0_ + (Y1_ - Y0_) * static_cast<double>(i) / static_cast<double>(N);
      inners[i] = inner(zs[i]);
    }
    std::vector<std::vector<double>> out;
    auto nearest = [](const std::vector<double>& v, double ref) {
      double best = v.front();
      for (double x : v)
        if (std::abs(x - ref) < std::abs(best - ref)) best = x;
      return best;
    };
    for (std::size_t i = 0; i < N; ++i) {
      const auto& A = inners[i];
      const auto& Bv = inners[i + 1];
      for (double ra : A) {
        if (Bv.empty()) continue;
        const double rb = nearest(Bv, ra);
        const double ga = r_left(zs[i], ra), gb = r_left(zs[i + 1], rb);
        if (ga == 0.0) {
          out.push_back({zs[i], ra});
          continue;
        }
        if (std::signbit(ga) == std::signbit(gb)) continue;
        double ref = ra;
        auto g = [&](double a) {
          const auto rs = inner(a);
          if (rs.empty()) return std::numeric_limits<double>::quiet_NaN();
          ref = nearest(rs, ref);
          return r_left(a, ref);
        };
        double lo = zs[i], hi = zs[i + 1];
        double glo = ga;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, Y1_ - Y0_); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = g(mid);
          if (std::isnan(gm)) break;
          if (std::signbit(gm) == std::signbit(glo)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        const double a = 0.5 * (lo + hi);
        const auto rs = inner(a);
        if (!rs.empty()) out.push_back({a, nearest(rs, ref)});
      }
    }
    if (out.empty()) {
      out.push_back({Y0_, Y0_});
      out.push_back({Y1_, Y1_});
      out.push_back({Y0_, Y1_});
    }
    return out;
  }

  std::optional<Candidate> assemble(const std::vector<double>& z) const {
    for (std::size_t j = 0; j + 1 < z.size(); ++j)
      if (z[j + 1] < z[j]) return std::nullopt;
    std::vector<Interval> iv;
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (j < blocks_.size() && blocks_[j] == Block::Sep) iv.push_back({z[j], z[j + 1]});
      iv.push_back({z[j], z[j]});
    }
    std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const Interval& i : iv) {
      if (!merged.empty() && i.lo <= merged.back().hi) merged.back().hi = std::max(merged.back().hi, i.hi);
      else merged.push_back(i);
    }
    MonotoneSet pi(std::move(merged), Y0_, Y1_);
    Certificate cert = verify_optimal(pi, nu_, c_);
    const double value = expected_nu(pi, nu_, c_);
    return Candidate{layout_, z, std::move(pi), value, std::move(cert)};
  }
};

}  // namespace

ShapeSolution classify_and_solve(const NuFunction& nu, const PiecewisePoly& c,
                                 const std::optional<QuantileDistribution>& dist) {
  if (dist && !dist->is_uniform()) throw Error(ErrorKind::NonUniformState, "reparameterize the state first");
  const double m_lo = c(c.lo()), m_hi = c(c.hi());
  const double a = std::max({0.0, nu.lo(), m_lo}), b = std::min({1.0, nu.hi(), m_hi});
  if (!(b > a)) throw Error(ErrorKind::InvalidArgument, "c misses the unit range");

  const CurvatureProfile prof = curvature_profile(nu, a, b);
  Shape shape = Shape::Convex;
  std::optional<double> inflection;
  const auto& s = prof.signs;
  if (s.size() > 2) throw Error(ErrorKind::UnsupportedShape, "nu has more than one inflection on [0, 1]");
  if (s.size() == 1 && s[0] < 0) shape = Shape::Concave;
  if (s.size() == 2) {
    shape = s[0] > 0 ? Shape::ConvexConcave : Shape::ConcaveConvex;
    inflection = prof.changes.front();
  }

  const double s0 = nu.slope_right(a), s1 = nu.slope_left(b) - 1.0;
  const std::string label = dispatch(shape, s0, s1);

  auto best_of = [](std::vector<Candidate>& cands, bool verified_only) -> Candidate* {
    Candidate* best = nullptr;
    for (auto& cand : cands) {
      if (verified_only && !cand.cert.verified()) continue;
      if (!best || cand.value > best->value + 1e-12 * std::max(1.0, std::abs(best->value))) best = &cand;
    }
    return best;
  };

  std::vector<std::string> notes;
  std::vector<Candidate> cands = TemplateSolver(nu, c, find_template(label)).solve();
  if (!best_of(cands, true)) {
    notes.push_back("case " + label + " produced no verified candidate; trying the other layouts");
    for (const Template& t : kTemplates) {
      if (&t == &find_template(label)) continue;
      for (auto& cand : TemplateSolver(nu, c, t).solve()) cands.push_back(std::move(cand));
    }
  }
  Candidate* pick = best_of(cands, true);
  if (!pick) {
    pick = best_of(cands, false);
    notes.push_back("no candidate verified");
  } else if (find_template(label).label != std::string_view(pick->layout)) {
    notes.push_back(std::string("verified with the layout of case ") + pick->layout);
  }
  if (!pick) throw Error(ErrorKind::UnsupportedShape, "no candidate set could be assembled");

  // Distinct verified sets.
  std::vector<const MonotoneSet*> distinct;
  auto same = [](const MonotoneSet& x, const MonotoneSet& y) {
    const auto bx = x.boundary_points(), by = y.boundary_points();
    if (bx.size() != by.size() || x.intervals().size() != y.intervals().size()) return false;
    for (std::size_t i = 0; i < bx.size(); ++i)
      if (std::abs(bx[i] - by[i]) > 1e-9 * std::max(1.0, std::abs(bx[i]))) return false;
    return true;
  };
  for (const auto& cand : cands) {
    if (!cand.cert.verified()) continue;
    if (std::none_of(distinct.begin(), distinct.end(), [&](const MonotoneSet* d) { return same(*d, cand.pi); }))
      distinct.push_back(&cand.pi);
  }
  const std::size_t verified = distinct.size();

  ShapeSolution out{shape, label, pick->pi, pick->cert, pick->value, inflection, {}, verified > 1,
                    s0, s1 + 1.0, std::move(notes)};
  for (std::size_t j = 1; j + 1 < pick->z.size(); ++j) out.cutoffs.push_back(pick->z[j]);
  if (verified > 1) out.notes.push_back(std::to_string(verified) + " verified candidates");
  return out;
}

}  // namespace monopart
