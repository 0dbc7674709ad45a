#include "scd/grid.hpp"

#include <algorithm>
#include <cmath>

namespace scd {

YGrid make_grid(std::span<const double> y_values, int n_points, double margin_sds) {
  if (y_values.empty()) throw InvalidInput("make_grid: empty response sample");
  if (!all_finite(y_values)) throw InvalidInput("make_grid: non-finite response value");
  if (n_points < 2) throw InvalidInput("make_grid: need at least 2 grid points");
  if (margin_sds < 0.0) throw InvalidInput("make_grid: negative margin");

  const auto [lo_it, hi_it] = std::minmax_element(y_values.begin(), y_values.end());
  const double sd = sample_sd(y_values);
  const double y_min = *lo_it - margin_sds * sd;
  const double y_max = *hi_it + margin_sds * sd;
  if (!(y_min < y_max)) {
    throw InvalidInput("make_grid: degenerate range (all responses equal?)");
  }
  return YGrid{y_min, y_max, n_points};
}

GridDensity::GridDensity(const YGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.n_points) {
    throw InvalidInput("GridDensity: value count does not match grid");
  }
}

double GridDensity::integral() const { return trapezoid(values, grid.step()); }

void GridDensity::normalize() {
  const double mass = integral();
  if (!std::isfinite(mass) || mass <= 0.0) {
    throw InvalidState("GridDensity::normalize: non-positive or non-finite mass");
  }
  for (double& v : values) v /= mass;
}

double GridDensity::value_at(double y) const {
  if (!grid.contains(y)) return 0.0;
  const double h = grid.step();
  const double pos = (y - grid.y_min) / h;
  int j = static_cast<int>(pos);
  if (j >= grid.n_points - 1) j = grid.n_points - 2;
  const double frac = pos - j;
  return values[j] + frac * (values[j + 1] - values[j]);
}

double GridDensity::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double trapezoid(std::span<const double> values, double step) {
  if (values.size() < 2) throw InvalidInput("trapezoid: need at least 2 values");
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t j = 1; j + 1 < values.size(); ++j) s += values[j];
  return s * step;
}

std::vector<double> density_cdf(const GridDensity& density) {
  if (std::abs(density.integral() - 1.0) > 1e-6) {
    throw InvalidState("density_cdf: density is not normalized");
  }
  const double h = density.grid.step();
  std::vector<double> cdf(density.values.size());
  cdf[0] = 0.0;
  for (std::size_t j = 1; j < density.values.size(); ++j) {
    cdf[j] = cdf[j - 1] + 0.5 * (density.values[j - 1] + density.values[j]) * h;
  }
  return cdf;
}

namespace {

// Integral of the linear segment (f0, f1) over the sub-cell where the
// predicate holds. `above` selects {f >= level}, otherwise {f <= level}.
double cell_mass(double f0, double f1, double h, double level, bool above) {
  const bool in0 = above ? (f0 >= level) : (f0 <= level);
  const bool in1 = above ? (f1 >= level) : (f1 <= level);
  if (in0 && in1) return 0.5 * (f0 + f1) * h;
  if (!in0 && !in1) return 0.0;
  // one crossing inside the cell
  if (in0) {
    const double theta = (f0 - level) / (f0 - f1);  // f0 != f1 here
    return 0.5 * (f0 + level) * theta * h;
  }
  const double theta = (f1 - level) / (f1 - f0);
  return 0.5 * (f1 + level) * theta * h;
}

double level_mass(const GridDensity& density, double level, bool above) {
  const double h = density.grid.step();
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < density.values.size(); ++j) {
    s += cell_mass(density.values[j], density.values[j + 1], h, level, above);
  }
  return s;
}

}  // namespace

double mass_at_or_above(const GridDensity& density, double level) {
  return level_mass(density, level, true);
}

double mass_at_or_below(const GridDensity& density, double level) {
  return level_mass(density, level, false);
}

double hpd_mass(const GridDensity& density, double y) {
  if (!std::isfinite(y) || !density.grid.contains(y)) {
    throw InvalidInput("hpd_mass: y outside grid range");
  }
  return mass_at_or_above(density, density.value_at(y));
}

}  // namespace scd
