#pragma once

#include <span>
#include <vector>

#include "scd/common.hpp"

namespace scd {

// Uniform grid over the response axis.
struct YGrid {
  double y_min = 0.0;
  double y_max = 1.0;
  int n_points = 2;

  double step() const { return (y_max - y_min) / (n_points - 1); }
  double point(int j) const { return y_min + j * step(); }
  double span() const { return y_max - y_min; }
  bool contains(double y) const { return y >= y_min && y <= y_max; }
  bool operator==(const YGrid&) const = default;
};

// Grid range is [min(y) - margin_sds*sd(y), max(y) + margin_sds*sd(y)],
// sd with denominator n-1.
YGrid make_grid(std::span<const double> y_values, int n_points, double margin_sds);

// Nonnegative function values on a YGrid; unit trapezoid integral after
// normalize().
struct GridDensity {
  YGrid grid;
  std::vector<double> values;

  GridDensity() = default;
  GridDensity(const YGrid& g, std::vector<double> v);

  double integral() const;
  // scales to unit integral; throws InvalidState on zero or non-finite mass
  void normalize();
  // linear interpolation between grid points; 0 outside the grid
  double value_at(double y) const;
  double max_value() const;
};

double trapezoid(std::span<const double> values, double step);

// Cumulative trapezoid integral F(y_j); requires a normalized density.
std::vector<double> density_cdf(const GridDensity& density);

// Mass of the superlevel / sublevel set at `level`, with the boundary cell
// split by linear interpolation so both are exact for piecewise-linear f.
double mass_at_or_above(const GridDensity& density, double level);
double mass_at_or_below(const GridDensity& density, double level);

// Mass of {y' : f(y') >= f(y)}. Throws InvalidInput for y outside the grid.
double hpd_mass(const GridDensity& density, double y);

}  // namespace scd
