#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "scd/grid.hpp"

using namespace scd;

TEST_CASE("make_grid with zero margin spans the data exactly") {
  const std::vector<double> y{0.0, 1.0, 2.0};
  const YGrid grid = make_grid(y, 3, 0.0);
  CHECK(grid.y_min == doctest::Approx(0.0));
  CHECK(grid.y_max == doctest::Approx(2.0));
  CHECK(grid.point(0) == doctest::Approx(0.0));
  CHECK(grid.point(1) == doctest::Approx(1.0));
  CHECK(grid.point(2) == doctest::Approx(2.0));
}

TEST_CASE("make_grid margin uses sample sd") {
  // sd of {0, 10} with denominator n-1 is sqrt(50)
  const std::vector<double> y{0.0, 10.0};
  const YGrid grid = make_grid(y, 101, 3.0);
  const double sd = std::sqrt(50.0);
  CHECK(grid.y_min == doctest::Approx(0.0 - 3.0 * sd).epsilon(1e-12));
  CHECK(grid.y_max == doctest::Approx(10.0 + 3.0 * sd).epsilon(1e-12));
  CHECK(grid.n_points == 101);
}

TEST_CASE("make_grid rejects bad input") {
  CHECK_THROWS_AS(make_grid(std::vector<double>{}, 16, 1.0), InvalidInput);
  CHECK_THROWS_AS(make_grid(std::vector<double>{0.0, std::nan(""), 1.0}, 16, 1.0), InvalidInput);
  CHECK_THROWS_AS(make_grid(std::vector<double>{5.0, 5.0}, 16, 0.0), InvalidInput);
  CHECK_THROWS_AS(make_grid(std::vector<double>{0.0, 1.0}, 1, 0.0), InvalidInput);
}

TEST_CASE("density normalization and interpolation") {
  const YGrid grid{0.0, 1.0, 11};
  GridDensity d(grid, std::vector<double>(11, 2.0));
  CHECK(d.integral() == doctest::Approx(2.0));
  d.normalize();
  CHECK(d.integral() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.value_at(0.55) == doctest::Approx(1.0));
  CHECK(d.value_at(-0.1) == 0.0);
  CHECK(d.value_at(1.1) == 0.0);

  GridDensity zero(grid, std::vector<double>(11, 0.0));
  CHECK_THROWS_AS(zero.normalize(), InvalidState);
}

TEST_CASE("density_cdf is linear for the uniform density") {
  const YGrid grid{0.0, 1.0, 101};
  GridDensity d(grid, std::vector<double>(101, 1.0));
  const auto cdf = density_cdf(d);
  for (int j = 0; j < 101; ++j) {
    CHECK(cdf[j] == doctest::Approx(grid.point(j)).epsilon(1e-9));
  }
  CHECK(cdf.back() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("density_cdf steps at a delta bump") {
  const YGrid grid{-1.0, 1.0, 401};
  std::vector<double> values(401, 0.0);
  values[200] = 1.0;  // centered at 0
  GridDensity d(grid, std::move(values));
  d.normalize();
  const auto cdf = density_cdf(d);
  CHECK(cdf[198] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(cdf[202] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("density_cdf matches the analytic Gaussian CDF") {
  const YGrid grid{-6.0, 6.0, 1024};
  const GridDensity d = test::gaussian_density(grid, 0.0, 1.0);
  const auto cdf = density_cdf(d);
  // F(0) via interpolation (0 is not a grid point here)
  const double f0 = [&] {
    const double pos = (0.0 - grid.y_min) / grid.step();
    const int j = static_cast<int>(pos);
    return cdf[j] + (pos - j) * (cdf[j + 1] - cdf[j]);
  }();
  CHECK(f0 == doctest::Approx(0.5).epsilon(1e-3));
  for (std::size_t j = 1; j < cdf.size(); ++j) CHECK(cdf[j] >= cdf[j - 1]);
}

TEST_CASE("density_cdf rejects unnormalized input") {
  const YGrid grid{0.0, 1.0, 32};
  GridDensity d(grid, std::vector<double>(32, 3.0));
  CHECK_THROWS_AS(density_cdf(d), InvalidState);
}

TEST_CASE("hpd_mass at the mode, at zero density, and against the Gaussian") {
  const YGrid grid{-6.0, 6.0, 1024};
  const GridDensity d = test::gaussian_density(grid, 0.0, 1.0);

  // global mode carries (at most one cell of) mass
  int mode = 0;
  for (int j = 0; j < grid.n_points; ++j) {
    if (d.values[j] > d.values[mode]) mode = j;
  }
  CHECK(hpd_mass(d, grid.point(mode)) <= 2.0 * d.max_value() * grid.step());

  // a response in the far tail is inside every superlevel set's complement
  CHECK(hpd_mass(d, 5.9) == doctest::Approx(1.0).epsilon(1e-4));

  // N(0,1): mass of {f >= f(1)} is P(|Z| <= 1)
  CHECK(hpd_mass(d, 1.0) == doctest::Approx(0.6826894921).epsilon(5e-3));

  CHECK_THROWS_AS(hpd_mass(d, 7.0), InvalidInput);
}

TEST_CASE("hpd_mass where the density vanishes is one") {
  const YGrid grid{-6.0, 6.0, 1024};
  const GridDensity d = test::gaussian_density(grid, -3.0, 0.3);
  CHECK(hpd_mass(d, 5.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hpd_mass is nonincreasing in the density value") {
  const YGrid grid{-6.0, 6.0, 512};
  const GridDensity d =
      test::mixture_density(grid, {-2.0, 1.5}, {0.6, 0.9}, {0.4, 0.6});
  Rng rng(7);
  const double cell_tol = d.max_value() * grid.step();
  for (int rep = 0; rep < 200; ++rep) {
    const double y1 = rng.uniform(-5.5, 5.5);
    const double y2 = rng.uniform(-5.5, 5.5);
    if (d.value_at(y1) >= d.value_at(y2)) {
      CHECK(hpd_mass(d, y1) <= hpd_mass(d, y2) + cell_tol);
    }
  }
}

TEST_CASE("level mass splits cells consistently") {
  const YGrid grid{-4.0, 4.0, 257};
  const GridDensity d = test::mixture_density(grid, {-1.0, 1.2}, {0.5, 0.4}, {0.5, 0.5});
  for (double frac : {0.0, 0.1, 0.42, 0.9}) {
    const double z = frac * d.max_value();
    const double above = mass_at_or_above(d, z);
    const double below = mass_at_or_below(d, z);
    // overlap only on the measure-zero set {f == z}
    CHECK(above + below == doctest::Approx(1.0).epsilon(1e-9));
  }
}
