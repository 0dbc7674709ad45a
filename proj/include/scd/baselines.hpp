#pragma once

#include <memory>
#include <span>

#include "scd/cde.hpp"
#include "scd/conformal.hpp"

namespace scd {

// Plain k-NN regressors backing the non-density baselines.
class KnnMeanRegressor {
 public:
  KnnMeanRegressor() = default;
  KnnMeanRegressor(const Matrix& x, std::span<const double> y, int k);

  double predict(std::span<const double> x) const;
  int neighbors() const { return k_; }

 private:
  Matrix x_;
  std::vector<double> y_;
  int k_ = 0;
};

class KnnQuantileRegressor {
 public:
  KnnQuantileRegressor() = default;
  KnnQuantileRegressor(const Matrix& x, std::span<const double> y, int k);

  // empirical quantile of the k neighbor responses, order statistic ceil(p*k)
  double predict(std::span<const double> x, double p) const;

 private:
  std::vector<int> neighbor_set(std::span<const double> x) const;

  Matrix x_;
  std::vector<double> y_;
  int k_ = 0;
};

// Split CP with absolute-residual scores around a k-NN mean. Always a single
// interval [mu - q, mu + q].
class VanillaCp {
 public:
  static VanillaCp fit(const Matrix& train_x, std::span<const double> train_y,
                       const Matrix& cal_x, std::span<const double> cal_y, double alpha, int k);

  IntervalSet predict(std::span<const double> x) const;
  double margin() const { return q_; }

 private:
  KnnMeanRegressor reg_;
  double q_ = 0.0;
};

// Conformalized quantile regression over k-NN empirical quantiles.
class CqrModel {
 public:
  static CqrModel fit(const Matrix& train_x, std::span<const double> train_y, const Matrix& cal_x,
                      std::span<const double> cal_y, double alpha, int k);

  IntervalSet predict(std::span<const double> x) const;
  double correction() const { return q_; }

 private:
  // lower/upper quantile curves; crossing curves clamp to their midpoint
  std::pair<double, double> curves(std::span<const double> x) const;

  KnnQuantileRegressor reg_;
  double alpha_ = 0.1;
  double q_ = 0.0;
};

// Conditional-CDF split: scores u_i = F(y_i | x_i); the prediction set
// {y : F(y|x) in [q_lo, q_hi]} is a single interval by monotonicity.
class DistSplitModel {
 public:
  static DistSplitModel fit(std::shared_ptr<const CdeModel> cde, const Matrix& cal_x,
                            std::span<const double> cal_y, double alpha);

  IntervalSet predict(std::span<const double> x) const;
  // variant for callers that already evaluated the conditional density
  IntervalSet predict_from(const GridDensity& density) const;
  std::pair<double, double> cdf_bounds() const { return {q_lo_, q_hi_}; }

 private:
  std::shared_ptr<const CdeModel> cde_;
  double q_lo_ = 0.0;
  double q_hi_ = 1.0;
};

// HPD split: scores are the HPD mass at the observed response; the set is
// the density superlevel set holding mass <= threshold.
class HpdSplitModel {
 public:
  static HpdSplitModel fit(std::shared_ptr<const CdeModel> cde, const Matrix& cal_x,
                           std::span<const double> cal_y, double alpha, std::uint64_t seed,
                           double smooth_sigma = 0.0);

  IntervalSet predict(std::span<const double> x) const;
  // `raw` is the unsmoothed conditional density at the query point
  IntervalSet predict_from(const GridDensity& raw) const;
  double mass_threshold() const { return threshold_; }

 private:
  GridDensity apply_smoothing(GridDensity density) const;

  std::shared_ptr<const CdeModel> cde_;
  double threshold_ = 1.0;
  double sigma_ = 0.0;
};

// F(y) by linear interpolation of a grid CDF; 0 left of the grid, 1 right.
double interpolate_cdf(const YGrid& grid, std::span<const double> cdf, double y);

// Smallest density level whose superlevel mass is <= target (bisection).
double level_for_hpd_mass(const GridDensity& density, double target_mass);

}  // namespace scd
