#pragma once

#include <span>

#include "scd/common.hpp"
#include "scd/grid.hpp"

namespace scd {

// k-NN Gaussian-kernel Nadaraya-Watson conditional density estimator.
// Training rows are stored in a canonical (sorted) order so that evaluation
// is invariant to the order the data arrived in.
struct CdeModel {
  Matrix x;               // standardized covariates, canonical order
  std::vector<double> y;  // responses, canonical order
  int neighbors = 0;      // k
  double h_x = 0.0;       // covariate bandwidth
  double h_y = 0.0;       // response bandwidth
  YGrid grid;
};

// h_y = 1.06 * scale * n^(-1/5) with `scale` the median nearest-neighbor
// response difference over a seeded 256-row subsample (floored at
// 1e-3 * grid step); h_x = median pairwise covariate distance within the
// same kind of subsample (floored at 1e-6).
CdeModel fit_cde(const Matrix& train_x, std::span<const double> train_y, int k,
                 const YGrid& grid, std::uint64_t seed);

// Normalized density on the model grid:
//   f(y | x) = sum_i w_i phi_hy(y - y_i) / sum_i w_i,
// with w_i = exp(-||x - x_i||^2 / (2 h_x^2)) over the k nearest training rows.
GridDensity eval_density(const CdeModel& model, std::span<const double> x);

}  // namespace scd
