#pragma once

#include <string>
#include <vector>

namespace monopart {

struct Interval {
  double lo;
  double hi;
  bool point() const noexcept { return lo == hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Cell of the partition induced by a monotone set: a separated point or a
/// pooling interval [lo, hi).
struct Element {
  double lo;
  double hi;
  bool pooled;
};

/// Closed subset of [lo, hi] written as a sorted union of disjoint closed
/// intervals. Used both as a delegation set and as the boundary set of a
/// monotone partition.
class MonotoneSet {
 public:
  MonotoneSet() = default;
  MonotoneSet(std::vector<Interval> intervals, double lo = 0.0, double hi = 1.0);

  /// Whole domain (full separation / full discretion).
  static MonotoneSet full(double lo = 0.0, double hi = 1.0);
  /// Only the two endpoints (single pool).
  static MonotoneSet endpoints(double lo = 0.0, double hi = 1.0);
  /// Finite set of points; duplicates are merged.
  static MonotoneSet points(std::vector<double> pts, double lo = 0.0, double hi = 1.0);

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool empty() const noexcept { return intervals_.empty(); }
  bool balanced() const noexcept;
  bool contains(double x) const noexcept;

  /// Gaps [b_i, a_{i+1}) between consecutive intervals.
  std::vector<Interval> pools() const;
  /// Every interval endpoint, sorted and unique.
  std::vector<double> boundary_points() const;
  /// Partition cell of state t; requires a balanced set.
  Element element(double t) const;

  std::string to_string() const;
  friend bool operator==(const MonotoneSet&, const MonotoneSet&) = default;

 private:
  std::vector<Interval> intervals_;
  double lo_ = 0.0;
  double hi_ = 1.0;
};

}  // namespace monopart
