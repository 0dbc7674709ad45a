#include "scd/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double kth_smallest(std::span<const double> scores, int k) {
  std::vector<double> copy(scores.begin(), scores.end());
  std::nth_element(copy.begin(), copy.begin() + (k - 1), copy.end());
  return copy[k - 1];
}

}  // namespace

IntervalSet::IntervalSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (!(intervals_[i].lo <= intervals_[i].hi)) {
      throw InvalidInput("IntervalSet: interval with lo > hi");
    }
    if (i > 0 && !(intervals_[i - 1].hi < intervals_[i].lo)) {
      throw InvalidInput("IntervalSet: intervals not sorted and disjoint");
    }
  }
}

IntervalSet IntervalSet::single(double lo, double hi) {
  return IntervalSet(std::vector<Interval>{{lo, hi}});
}

double IntervalSet::total_length() const {
  double s = 0.0;
  for (const Interval& iv : intervals_) s += iv.length();
  return s;
}

bool IntervalSet::contains(double y) const {
  for (const Interval& iv : intervals_) {
    if (y < iv.lo) return false;
    if (y <= iv.hi) return true;
  }
  return false;
}

double lower_quantile(std::span<const double> scores, double alpha) {
  if (scores.empty()) throw InvalidInput("lower_quantile: empty scores");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("lower_quantile: alpha outside (0,1)");
  const int m = static_cast<int>(scores.size());
  const int k = static_cast<int>(std::floor(alpha * (m + 1)));
  if (k == 0) return -kInf;
  return kth_smallest(scores, k);
}

double upper_quantile_conformal(std::span<const double> scores, double alpha) {
  if (scores.empty()) throw InvalidInput("upper_quantile_conformal: empty scores");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("upper_quantile_conformal: alpha outside (0,1)");
  }
  const int m = static_cast<int>(scores.size());
  const int r = static_cast<int>(std::ceil((1.0 - alpha) * (m + 1)));
  if (r > m) return kInf;
  return kth_smallest(scores, r);
}

IntervalSet superlevel_intervals(const GridDensity& density, double threshold) {
  const YGrid& grid = density.grid;
  if (std::isnan(threshold)) throw InvalidInput("superlevel_intervals: NaN threshold");
  if (threshold == -kInf) return IntervalSet::single(grid.y_min, grid.y_max);

  const std::vector<double>& f = density.values;
  const int n = grid.n_points;
  const double h = grid.step();
  std::vector<Interval> intervals;

  int j = 0;
  while (j < n) {
    if (f[j] < threshold) {
      ++j;
      continue;
    }
    const int run_start = j;
    while (j + 1 < n && f[j + 1] >= threshold) ++j;
    const int run_end = j;

    double lo = grid.y_min;
    if (run_start > 0) {
      // f[run_start-1] < t <= f[run_start]
      const double frac = (threshold - f[run_start - 1]) / (f[run_start] - f[run_start - 1]);
      lo = grid.point(run_start - 1) + frac * h;
    }
    double hi = grid.y_max;
    if (run_end < n - 1) {
      const double frac = (f[run_end] - threshold) / (f[run_end] - f[run_end + 1]);
      hi = grid.point(run_end) + frac * h;
    }
    intervals.push_back({lo, hi});
    ++j;
  }
  return IntervalSet(std::move(intervals));
}

bool apply_tie_jitter(std::vector<double>& scores, double alpha, std::uint64_t seed) {
  if (scores.empty()) return false;
  const double lo = *std::min_element(scores.begin(), scores.end());
  const auto ties = std::count(scores.begin(), scores.end(), lo);
  if (static_cast<double>(ties) <= alpha * static_cast<double>(scores.size())) return false;

  double scale = 0.0;
  for (double s : scores) scale = std::max(scale, std::abs(s));
  if (scale == 0.0) scale = 1.0;
  Rng rng(seed);
  for (double& s : scores) s += rng.uniform(0.0, 1e-9 * scale);
  return true;
}

}  // namespace scd
