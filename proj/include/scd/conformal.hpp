#pragma once

#include <span>
#include <vector>

#include "scd/grid.hpp"

namespace scd {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

// Ordered list of disjoint closed intervals.
class IntervalSet {
 public:
  IntervalSet() = default;
  // validates ordering/disjointness
  explicit IntervalSet(std::vector<Interval> intervals);

  static IntervalSet empty() { return IntervalSet(); }
  static IntervalSet single(double lo, double hi);

  const std::vector<Interval>& intervals() const { return intervals_; }
  int count() const { return static_cast<int>(intervals_.size()); }
  double total_length() const;
  bool contains(double y) const;  // closed-interval membership
  bool operator==(const IntervalSet&) const = default;

 private:
  std::vector<Interval> intervals_;
};

enum class ScoreKind { density, residual, cdf, hpd, cqr };

struct ScoreSample {
  std::vector<double> values;
  ScoreKind kind = ScoreKind::density;
};

// k-th smallest with k = floor(alpha * (m+1)); -inf when k = 0, so the
// prediction set degenerates to the full range. Guarantees
// P(U_{m+1} >= t) >= 1 - alpha under exchangeability.
double lower_quantile(std::span<const double> scores, double alpha);

// ceil((1-alpha) * (m+1))-th smallest; +inf when the index exceeds m.
double upper_quantile_conformal(std::span<const double> scores, double alpha);

// Maximal runs of grid points with f >= threshold, endpoints refined by
// linear interpolation across the crossing cell. -inf yields the full range.
IntervalSet superlevel_intervals(const GridDensity& density, double threshold);

// Breaks degenerate score ties: when more than an alpha fraction of the
// scores sit exactly at the minimum, adds seeded U(0, 1e-9 * scale) noise to
// every score. Returns whether jitter was applied.
bool apply_tie_jitter(std::vector<double>& scores, double alpha, std::uint64_t seed);

}  // namespace scd
