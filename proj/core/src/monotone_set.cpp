#include "monopart/monotone_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "monopart/error.hpp"

namespace monopart {

MonotoneSet::MonotoneSet(std::vector<Interval> intervals, double lo, double hi)
    : intervals_(std::move(intervals)), lo_(lo), hi_(hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorKind::InvalidArgument, "monotone set domain must satisfy lo < hi");
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const Interval& iv = intervals_[i];
    if (!(iv.lo <= iv.hi)) throw Error(ErrorKind::InvalidArgument, "interval with lo > hi");
    if (iv.lo < lo || iv.hi > hi) throw Error(ErrorKind::OutOfDomain, "interval outside the domain");
    if (i > 0 && !(intervals_[i - 1].hi < iv.lo))
      throw Error(ErrorKind::InvalidArgument, "intervals must be disjoint");
  }
}

MonotoneSet MonotoneSet::full(double lo, double hi) { return MonotoneSet({{lo, hi}}, lo, hi); }

MonotoneSet MonotoneSet::endpoints(double lo, double hi) {
  return MonotoneSet({{lo, lo}, {hi, hi}}, lo, hi);
}

MonotoneSet MonotoneSet::points(std::vector<double> pts, double lo, double hi) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Interval> iv;
  iv.reserve(pts.size());
  for (double p : pts) iv.push_back({p, p});
  return MonotoneSet(std::move(iv), lo, hi);
}

bool MonotoneSet::balanced() const noexcept {
  return !intervals_.empty() && intervals_.front().lo == lo_ && intervals_.back().hi == hi_;
}

bool MonotoneSet::contains(double x) const noexcept {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return false;
  --it;
  return x <= it->hi;
}

std::vector<Interval> MonotoneSet::pools() const {
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < intervals_.size(); ++i)
    out.push_back({intervals_[i].hi, intervals_[i + 1].lo});
  return out;
}

std::vector<double> MonotoneSet::boundary_points() const {
  std::vector<double> out;
  for (const Interval& iv : intervals_) {
    out.push_back(iv.lo);
    if (iv.hi != iv.lo) out.push_back(iv.hi);
  }
  return out;
}

Element MonotoneSet::element(double t) const {
  if (!balanced()) throw Error(ErrorKind::UnbalancedSet, "partition needs both domain endpoints");
  const double slack = 1e-12 * std::max({1.0, std::abs(lo_), std::abs(hi_)});
  if (t < lo_ - slack || t > hi_ + slack) throw Error(ErrorKind::OutOfDomain, "state outside the domain");
  t = std::clamp(t, lo_, hi_);
  if (t == hi_) return {t, t, false};
  // Last interval whose left end is <= t.
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  const auto i = static_cast<std::size_t>(std::distance(intervals_.begin(), it)) - 1;
  const Interval& iv = intervals_[i];
  if (t < iv.hi) return {t, t, false};
  return {iv.hi, intervals_[i + 1].lo, true};
}

std::string MonotoneSet::to_string() const {
  std::string s;
  char buf[64];
  for (const Interval& iv : intervals_) {
    if (!s.empty()) s += " U ";
    if (iv.point())
      std::snprintf(buf, sizeof buf, "{%.10g}", iv.lo);
    else
      std::snprintf(buf, sizeof buf, "[%.10g, %.10g]", iv.lo, iv.hi);
    s += buf;
  }
  return s.empty() ? "{}" : s;
}

}  // namespace monopart
