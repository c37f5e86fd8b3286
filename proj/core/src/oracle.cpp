#include "monopart/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "monopart/equivalence.hpp"
#include "monopart/error.hpp"

namespace monopart {

namespace {

constexpr std::uint64_t kMaxCandidates = std::uint64_t{1} << 24;
constexpr double kTieTol = 1e-12;

bool beats(double v, const GridCode& c, double w, const GridCode& d) {
  const double tol = kTieTol * std::max({1.0, std::abs(v), std::abs(w)});
  if (v > w + tol) return true;
  if (v < w - tol) return false;
  return c < d;
}

class Ranking {
 public:
  explicit Ranking(std::size_t k) : k_(std::max<std::size_t>(k, 1)) {}

  void offer(const GridCode& code, double value, std::optional<double> agent) {
    ++count_;
    if (top_.size() == k_ && !beats(value, code, top_.back().value, top_.back().code)) return;
    Entry e{code, value, agent};
    auto it = std::find_if(top_.begin(), top_.end(),
                           [&](const Entry& o) { return beats(value, code, o.value, o.code); });
    top_.insert(it, e);
    if (top_.size() > k_) top_.pop_back();
  }

  OracleResult finish(std::span<const double> grid) const {
    OracleResult r;
    r.grid.assign(grid.begin(), grid.end());
    r.evaluated = count_;
    for (const Entry& e : top_) r.top.push_back({decode(e.code, grid), e.code, e.value, e.agent});
    r.best = r.top.front().set;
    r.code = r.top.front().code;
    r.value = r.top.front().value;
    return r;
  }

 private:
  struct Entry {
    GridCode code;
    double value;
    std::optional<double> agent;
  };
  std::size_t k_;
  std::size_t count_ = 0;
  std::vector<Entry> top_;
};

void check_size(std::size_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "need at least one cell");
  if (n > 22 || candidate_count(n) > kMaxCandidates)
    throw Error(ErrorKind::TooManyCells, "grid too fine for exhaustive enumeration");
}

// Walks every code; `visit(a, b, sep)` returns the block's contribution for
// cell a..b (sep only when b == a + 1), `leaf(code, total)` sees each code.
template <class Block, class Leaf>
void walk(std::size_t n, Block block, Leaf leaf) {
  GridCode code;
  std::function<void(std::size_t, double, double)> rec = [&](std::size_t a, double pv, double av) {
    if (a == n) {
      leaf(code, pv, av);
      return;
    }
    for (std::size_t b = a + 1; b <= n; ++b) {
      if (b < n) code.nodes |= std::uint32_t{1} << (b - 1);
      if (b == a + 1) {
        code.separated |= std::uint32_t{1} << a;
        const auto [sp, sa] = block(a, b, true);
        rec(b, pv + sp, av + sa);
        code.separated &= ~(std::uint32_t{1} << a);
      }
      const auto [qp, qa] = block(a, b, false);
      rec(b, pv + qp, av + qa);
      if (b < n) code.nodes &= ~(std::uint32_t{1} << (b - 1));
    }
  };
  rec(0, 0.0, 0.0);
}

// Tables of block contributions indexed by (a, b) and the separated cells.
struct BlockTable {
  std::size_t n;
  std::vector<std::pair<double, double>> pool, sep;
  std::pair<double, double> operator()(std::size_t a, std::size_t b, bool separated) const {
    return separated ? sep[a] : pool[a * (n + 1) + b];
  }
};

}  // namespace

std::uint64_t candidate_count(std::size_t n) {
  // Transfer matrix over "node in the set" / "node out".
  std::uint64_t in = 1, out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t nin = 2 * in + out, nout = in + out;
    in = nin;
    out = nout;
    if (in > (std::uint64_t{1} << 62)) return in;
  }
  return in;
}

std::vector<double> snapped_grid(double lo, double hi, std::size_t n, std::span<const double> critical) {
  if (!(hi > lo) || n < 1) throw Error(ErrorKind::InvalidArgument, "empty grid");
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    g[i] = i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  std::vector<bool> taken(n + 1, false);
  for (double x : critical) {
    if (!(x > lo && x < hi)) continue;
    std::size_t best = 0;
    double dist = INFINITY;
    for (std::size_t i = 1; i < n; ++i) {
      const double d = std::abs(g[i] - x);
      if (!taken[i] && d < dist) {
        dist = d;
        best = i;
      }
    }
    if (best == 0) throw Error(ErrorKind::InvalidArgument, "more critical points than interior nodes");
    g[best] = x;
    taken[best] = true;
  }
  std::sort(g.begin(), g.end());
  for (std::size_t i = 0; i < n; ++i)
    if (!(g[i + 1] > g[i])) throw Error(ErrorKind::InvalidArgument, "critical points collide on the grid");
  return g;
}

MonotoneSet decode(const GridCode& code, std::span<const double> grid) {
  const std::size_t n = grid.size() - 1;
  std::vector<Interval> iv;
  auto node_in = [&](std::size_t i) { return i == 0 || i == n || ((code.nodes >> (i - 1)) & 1u); };
  for (std::size_t i = 0; i <= n; ++i) {
    if (!node_in(i)) continue;
    const bool sep = i < n && ((code.separated >> i) & 1u);
    if (sep && !node_in(i + 1)) throw Error(ErrorKind::InvalidArgument, "separated cell with a missing node");
    const double a = grid[i], b = sep ? grid[i + 1] : grid[i];
    if (!iv.empty() && iv.back().hi >= a) iv.back().hi = std::max(iv.back().hi, b);
    else iv.push_back({a, b});
  }
  return MonotoneSet(std::move(iv), grid.front(), grid.back());
}

OracleResult enumerate_optimum(const Primitive& p0, OracleMode mode, const OracleOptions& opt) {
  check_size(opt.n);
  Ranking rank(opt.top_k);
  if (mode == OracleMode::Delegation) {
    if (p0.orientation() != Orientation::Delegation)
      throw Error(ErrorKind::WrongOrientation, "delegation oracle needs a delegation primitive");
    const Primitive p = quantile_reparameterize(p0);
    const auto grid = snapped_grid(p.decision_lo(), p.decision_hi(), opt.n, opt.critical_points);
    walk(opt.n, [](std::size_t, std::size_t, bool) { return std::pair{0.0, 0.0}; },
         [&](const GridCode& code, double, double) {
           const Payoffs v = expected_payoffs(p, decode(code, grid), opt.tb);
           rank.offer(code, v.principal, v.agent);
         });
    return rank.finish(grid);
  }
  if (p0.orientation() != Orientation::Persuasion)
    throw Error(ErrorKind::WrongOrientation, "persuasion oracle needs a persuasion primitive");
  const Primitive p = quantile_reparameterize(p0);
  const auto grid = snapped_grid(p.state_lo(), p.state_hi(), opt.n, opt.critical_points);
  const std::size_t n = opt.n;
  BlockTable table{n, std::vector<std::pair<double, double>>((n + 1) * (n + 1)), {}};
  for (std::size_t a = 0; a < n; ++a) {
    const Payoffs s = persuasion_cell_payoffs(p, grid[a], grid[a + 1], false, opt.tb);
    table.sep.emplace_back(s.principal, s.agent);
    for (std::size_t b = a + 1; b <= n; ++b) {
      const Payoffs q = persuasion_cell_payoffs(p, grid[a], grid[b], true, opt.tb);
      table.pool[a * (n + 1) + b] = {q.principal, q.agent};
    }
  }
  walk(n, table, [&](const GridCode& code, double pv, double av) { rank.offer(code, pv, av); });
  return rank.finish(grid);
}

OracleResult enumerate_optimum(const NuFunction& nu, const PiecewisePoly& c, const OracleOptions& opt) {
  check_size(opt.n);
  const std::size_t n = opt.n;
  const auto grid = snapped_grid(c.lo(), c.hi(), n, opt.critical_points);
  BlockTable table{n, std::vector<std::pair<double, double>>((n + 1) * (n + 1)), {}};
  for (std::size_t a = 0; a < n; ++a) {
    table.sep.emplace_back(separated_value(nu, c, grid[a], grid[a + 1]), 0.0);
    for (std::size_t b = a + 1; b <= n; ++b)
      table.pool[a * (n + 1) + b] = {pooled_value(nu, c, grid[a], grid[b]), 0.0};
  }
  Ranking rank(opt.top_k);
  walk(n, table, [&](const GridCode& code, double pv, double) { rank.offer(code, pv, std::nullopt); });
  return rank.finish(grid);
}

BatteryReport equivalence_battery(const Primitive& pD, std::size_t trials, std::uint64_t seed,
                                  std::size_t n, double tol, const std::optional<Primitive>& pP_in) {
  if (pD.orientation() != Orientation::Delegation)
    throw Error(ErrorKind::WrongOrientation, "battery needs a delegation primitive");
  if (n < 1 || n > 31) throw Error(ErrorKind::InvalidArgument, "battery grid must have 1 to 31 cells");
  const Primitive pP = pP_in ? *pP_in : delegation_to_persuasion(pD);
  BatteryReport rep;
  rep.seed = seed;
  rep.trials = trials;
  rep.n = n;
  rep.tol = tol;
  const auto gd = snapped_grid(pD.decision_lo(), pD.decision_hi(), n, {});
  const auto gp = snapped_grid(pP.state_lo(), pP.state_hi(), n, {});
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t t = 0; t < trials; ++t) {
    GridCode code;
    for (std::size_t i = 1; i < n; ++i)
      if (coin(rng)) code.nodes |= std::uint32_t{1} << (i - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const bool l = i == 0 || ((code.nodes >> (i - 1)) & 1u);
      const bool r = i + 1 == n || ((code.nodes >> i) & 1u);
      if (l && r && coin(rng)) code.separated |= std::uint32_t{1} << i;
    }
    const MonotoneSet sd = decode(code, gd);
    const Payoffs vd = expected_payoffs(pD, sd);
    const Payoffs vp = expected_payoffs(pP, decode(code, gp));
    const double gp_ = std::abs(vd.principal - vp.principal), ga = std::abs(vd.agent - vp.agent);
    rep.max_gap_principal = std::max(rep.max_gap_principal, gp_);
    rep.max_gap_agent = std::max(rep.max_gap_agent, ga);
    if (gp_ > tol || ga > tol) {
      std::ostringstream os;
      os.precision(17);
      os << sd.to_string() << " principal " << vd.principal << " vs " << vp.principal << ", agent "
         << vd.agent << " vs " << vp.agent;
      rep.violations.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace monopart
