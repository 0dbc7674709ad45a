#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "scd/grid.hpp"

namespace scd::test {

inline double normal_pdf(double y, double mu, double sd) {
  const double u = (y - mu) / sd;
  return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_cdf(double y, double mu = 0.0, double sd = 1.0) {
  return 0.5 * std::erfc(-(y - mu) / (sd * std::numbers::sqrt2));
}

inline GridDensity gaussian_density(const YGrid& grid, double mu, double sd) {
  std::vector<double> values(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) values[j] = normal_pdf(grid.point(j), mu, sd);
  GridDensity density(grid, std::move(values));
  density.normalize();
  return density;
}

inline GridDensity mixture_density(const YGrid& grid, const std::vector<double>& mus,
                                   const std::vector<double>& sds,
                                   const std::vector<double>& weights) {
  std::vector<double> values(grid.n_points, 0.0);
  for (std::size_t c = 0; c < mus.size(); ++c) {
    for (int j = 0; j < grid.n_points; ++j) {
      values[j] += weights[c] * normal_pdf(grid.point(j), mus[c], sds[c]);
    }
  }
  GridDensity density(grid, std::move(values));
  density.normalize();
  return density;
}

// strict local maxima over a +-window neighborhood, above a prominence floor
inline std::vector<int> find_modes(const std::vector<double>& v, double min_fraction_of_max,
                                   int window = 1) {
  double max_v = 0.0;
  for (double x : v) max_v = std::max(max_v, x);
  std::vector<int> modes;
  const int n = static_cast<int>(v.size());
  for (int j = 1; j + 1 < n; ++j) {
    if (v[j] < min_fraction_of_max * max_v) continue;
    bool is_max = true;
    for (int w = std::max(0, j - window); w <= std::min(n - 1, j + window); ++w) {
      if (w != j && v[w] >= v[j]) {
        is_max = false;
        break;
      }
    }
    if (is_max) modes.push_back(j);
  }
  return modes;
}

}  // namespace scd::test
