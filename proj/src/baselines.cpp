#include "scd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scd/smoothing.hpp"

namespace scd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> knn_indices(const Matrix& x, std::span<const double> q, int k) {
  const int n = x.rows;
  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i) dist[i] = {squared_distance(q, x.row(i)), i};
  std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = dist[i].second;
  std::sort(idx.begin(), idx.end());
  return idx;
}

void check_fit_inputs(const Matrix& x, std::span<const double> y, int k) {
  if (x.rows != static_cast<int>(y.size())) {
    throw InvalidInput("knn fit: covariate/response count mismatch");
  }
  if (k < 1) throw InvalidInput("knn fit: need k >= 1");
  if (x.rows < k) throw InvalidInput("knn fit: fewer rows than neighbors");
}

}  // namespace

KnnMeanRegressor::KnnMeanRegressor(const Matrix& x, std::span<const double> y, int k)
    : x_(x), y_(y.begin(), y.end()), k_(k) {
  check_fit_inputs(x_, y_, k_);
}

double KnnMeanRegressor::predict(std::span<const double> x) const {
  const auto idx = knn_indices(x_, x, k_);
  double s = 0.0;
  for (int i : idx) s += y_[i];
  return s / k_;
}

KnnQuantileRegressor::KnnQuantileRegressor(const Matrix& x, std::span<const double> y, int k)
    : x_(x), y_(y.begin(), y.end()), k_(k) {
  check_fit_inputs(x_, y_, k_);
}

std::vector<int> KnnQuantileRegressor::neighbor_set(std::span<const double> x) const {
  return knn_indices(x_, x, k_);
}

double KnnQuantileRegressor::predict(std::span<const double> x, double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("KnnQuantileRegressor: p outside (0,1)");
  const auto idx = neighbor_set(x);
  std::vector<double> vals(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) vals[i] = y_[idx[i]];
  int r = static_cast<int>(std::ceil(p * k_));
  r = std::clamp(r, 1, k_);
  std::nth_element(vals.begin(), vals.begin() + (r - 1), vals.end());
  return vals[r - 1];
}

VanillaCp VanillaCp::fit(const Matrix& train_x, std::span<const double> train_y,
                         const Matrix& cal_x, std::span<const double> cal_y, double alpha,
                         int k) {
  VanillaCp model;
  model.reg_ = KnnMeanRegressor(train_x, train_y, std::min(k, train_x.rows));
  ScoreSample scores{{}, ScoreKind::residual};
  scores.values.resize(cal_y.size());
  for (std::size_t i = 0; i < cal_y.size(); ++i) {
    scores.values[i] = std::abs(cal_y[i] - model.reg_.predict(cal_x.row(static_cast<int>(i))));
  }
  model.q_ = upper_quantile_conformal(scores.values, alpha);
  return model;
}

IntervalSet VanillaCp::predict(std::span<const double> x) const {
  const double mu = reg_.predict(x);
  return IntervalSet::single(mu - q_, mu + q_);
}

CqrModel CqrModel::fit(const Matrix& train_x, std::span<const double> train_y, const Matrix& cal_x,
                       std::span<const double> cal_y, double alpha, int k) {
  CqrModel model;
  model.alpha_ = alpha;
  model.reg_ = KnnQuantileRegressor(train_x, train_y, std::min(k, train_x.rows));
  ScoreSample scores{{}, ScoreKind::cqr};
  scores.values.resize(cal_y.size());
  for (std::size_t i = 0; i < cal_y.size(); ++i) {
    const auto [lo, hi] = model.curves(cal_x.row(static_cast<int>(i)));
    scores.values[i] = std::max(lo - cal_y[i], cal_y[i] - hi);
  }
  model.q_ = upper_quantile_conformal(scores.values, alpha);
  return model;
}

std::pair<double, double> CqrModel::curves(std::span<const double> x) const {
  double lo = reg_.predict(x, alpha_ / 2.0);
  double hi = reg_.predict(x, 1.0 - alpha_ / 2.0);
  if (lo > hi) {
    const double mid = 0.5 * (lo + hi);
    lo = hi = mid;
  }
  return {lo, hi};
}

IntervalSet CqrModel::predict(std::span<const double> x) const {
  const auto [lo, hi] = curves(x);
  const double a = lo - q_;
  const double b = hi + q_;
  if (a > b) return IntervalSet::empty();
  return IntervalSet::single(a, b);
}

double interpolate_cdf(const YGrid& grid, std::span<const double> cdf, double y) {
  if (y <= grid.y_min) return 0.0;
  if (y >= grid.y_max) return cdf.back();
  const double h = grid.step();
  const double pos = (y - grid.y_min) / h;
  int j = static_cast<int>(pos);
  if (j >= grid.n_points - 1) j = grid.n_points - 2;
  const double frac = pos - j;
  return cdf[j] + frac * (cdf[j + 1] - cdf[j]);
}

DistSplitModel DistSplitModel::fit(std::shared_ptr<const CdeModel> cde, const Matrix& cal_x,
                                   std::span<const double> cal_y, double alpha) {
  if (!cde) throw InvalidInput("DistSplitModel: null density model");
  DistSplitModel model;
  model.cde_ = std::move(cde);

  ScoreSample scores{{}, ScoreKind::cdf};
  scores.values.resize(cal_y.size());
  for (std::size_t i = 0; i < cal_y.size(); ++i) {
    const GridDensity density = eval_density(*model.cde_, cal_x.row(static_cast<int>(i)));
    scores.values[i] = interpolate_cdf(density.grid, density_cdf(density), cal_y[i]);
  }

  const int m = static_cast<int>(scores.values.size());
  const int lo_idx = static_cast<int>(std::floor(alpha / 2.0 * (m + 1)));
  const int hi_idx = static_cast<int>(std::ceil((1.0 - alpha / 2.0) * (m + 1)));
  std::sort(scores.values.begin(), scores.values.end());
  model.q_lo_ = lo_idx >= 1 ? scores.values[lo_idx - 1] : -kInf;
  model.q_hi_ = hi_idx <= m ? scores.values[hi_idx - 1] : kInf;
  return model;
}

IntervalSet DistSplitModel::predict(std::span<const double> x) const {
  return predict_from(eval_density(*cde_, x));
}

IntervalSet DistSplitModel::predict_from(const GridDensity& density) const {
  const auto cdf = density_cdf(density);
  const YGrid& grid = density.grid;
  const int n = grid.n_points;
  const double h = grid.step();

  double lo = grid.y_min;
  if (q_lo_ > 0.0) {
    for (int j = 0; j + 1 < n; ++j) {
      if (cdf[j + 1] >= q_lo_) {
        const double dF = cdf[j + 1] - cdf[j];
        lo = grid.point(j) + (dF > 0.0 ? (q_lo_ - cdf[j]) / dF * h : 0.0);
        break;
      }
    }
  }
  double hi = grid.y_max;
  if (q_hi_ < cdf[n - 1]) {
    for (int j = n - 1; j > 0; --j) {
      if (cdf[j - 1] <= q_hi_) {
        const double dF = cdf[j] - cdf[j - 1];
        hi = grid.point(j - 1) + (dF > 0.0 ? (q_hi_ - cdf[j - 1]) / dF * h : 0.0);
        break;
      }
    }
  }
  if (lo > hi) return IntervalSet::empty();
  return IntervalSet::single(lo, hi);
}

double level_for_hpd_mass(const GridDensity& density, double target_mass) {
  if (target_mass >= 1.0) return 0.0;
  double lo = 0.0;
  double hi = density.max_value();
  if (mass_at_or_above(density, hi) > target_mass) return hi;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass_at_or_above(density, mid) > target_mass) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

GridDensity HpdSplitModel::apply_smoothing(GridDensity density) const {
  if (sigma_ > 0.0) density = smooth_density(density, SmoothParams{.sigma = sigma_});
  return density;
}

HpdSplitModel HpdSplitModel::fit(std::shared_ptr<const CdeModel> cde, const Matrix& cal_x,
                                 std::span<const double> cal_y, double alpha, std::uint64_t seed,
                                 double smooth_sigma) {
  if (!cde) throw InvalidInput("HpdSplitModel: null density model");
  HpdSplitModel model;
  model.cde_ = std::move(cde);
  model.sigma_ = smooth_sigma;

  ScoreSample scores{{}, ScoreKind::hpd};
  scores.values.resize(cal_y.size());
  for (std::size_t i = 0; i < cal_y.size(); ++i) {
    const GridDensity density =
        model.apply_smoothing(eval_density(*model.cde_, cal_x.row(static_cast<int>(i))));
    // responses that fall off the grid carry the maximal score
    scores.values[i] = density.grid.contains(cal_y[i]) ? hpd_mass(density, cal_y[i]) : 1.0;
  }
  apply_tie_jitter(scores.values, alpha, mix_seed(seed, 0x4a17));
  const double t = upper_quantile_conformal(scores.values, alpha);
  model.threshold_ = std::min(t, 1.0);
  return model;
}

IntervalSet HpdSplitModel::predict(std::span<const double> x) const {
  return predict_from(eval_density(*cde_, x));
}

IntervalSet HpdSplitModel::predict_from(const GridDensity& raw) const {
  const GridDensity density = apply_smoothing(raw);
  if (threshold_ >= 1.0) {
    return IntervalSet::single(density.grid.y_min, density.grid.y_max);
  }
  return superlevel_intervals(density, level_for_hpd_mass(density, threshold_));
}

}  // namespace scd
