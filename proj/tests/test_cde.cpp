#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "scd/cde.hpp"
#include "scd/datagen.hpp"

using namespace scd;

namespace {

Matrix matrix_from(const std::vector<std::vector<double>>& rows) {
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), m.row(static_cast<int>(i)).begin());
  }
  return m;
}

}  // namespace

TEST_CASE("fit_cde rejects more neighbors than points") {
  const Matrix x = matrix_from({{0.0}, {1.0}});
  const std::vector<double> y{0.0, 1.0};
  const YGrid grid{-1.0, 2.0, 64};
  CHECK_THROWS_AS(fit_cde(x, y, 3, grid, 1), InvalidInput);
  CHECK_THROWS_AS(fit_cde(x, y, 1, grid, 1), InvalidInput);
}

TEST_CASE("degenerate response spread floors the bandwidth") {
  const Matrix x = matrix_from({{0.0}, {1.0}});
  const std::vector<double> y{0.0, 0.0};
  const YGrid grid{-1.0, 1.0, 64};
  const CdeModel model = fit_cde(x, y, 2, grid, 1);
  CHECK(model.h_y == doctest::Approx(1e-3 * grid.step()).epsilon(1e-12));
}

TEST_CASE("degenerate covariate spread floors h_x") {
  const Matrix x = matrix_from({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}});
  const std::vector<double> y{0.0, 0.5, 1.0};
  const YGrid grid{-1.0, 2.0, 64};
  const CdeModel model = fit_cde(x, y, 2, grid, 1);
  CHECK(model.h_x == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("h_y follows the n^(-1/5) rule at the local response scale") {
  const Dataset data = gen_simple(200, 42);
  const YGrid grid = make_grid(data.y, 1024, 3.0);
  const CdeModel model = fit_cde(data.x, data.y, 100, grid, 7);

  // brute-force recomputation: for every row, the nearest covariate
  // neighbor's response difference; the median scaled to a Gaussian sd
  // (subsample cap is 256, so at n = 200 all rows take part)
  std::vector<double> diffs;
  for (int i = 0; i < data.n(); ++i) {
    double best = 1e300;
    int best_j = -1;
    for (int j = 0; j < data.n(); ++j) {
      if (j == i) continue;
      const double d = squared_distance(data.x.row(i), data.x.row(j));
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    diffs.push_back(std::abs(data.y[i] - data.y[best_j]));
  }
  std::sort(diffs.begin(), diffs.end());
  const double scale = diffs[(diffs.size() - 1) / 2] / 0.9539;
  const double expected = 1.06 * scale * std::pow(200.0, -0.2);
  CHECK(model.h_y == doctest::Approx(expected).epsilon(1e-12));
  // the simple benchmark's conditional spread is close to its marginal one
  CHECK(model.h_y > 0.1);
  CHECK(model.h_y < 0.6);
}

TEST_CASE("two coincident nearest neighbors give a single Gaussian bump") {
  // the two rows nearest x = 0 share the response 1.5; far row pairs keep
  // the median local response scale positive
  const Matrix x =
      matrix_from({{0.0}, {0.0}, {9.0}, {9.0}, {12.0}, {12.0}, {15.0}, {15.0}});
  const std::vector<double> y{1.5, 1.5, -1.0, 4.0, 0.0, 6.0, 1.0, 7.0};
  const YGrid grid{-4.0, 7.0, 1024};
  const CdeModel model = fit_cde(x, y, 2, grid, 1);
  const GridDensity d = eval_density(model, std::vector<double>{0.0});

  GridDensity expected = test::gaussian_density(grid, 1.5, model.h_y);
  double diff = 0.0;
  for (int j = 0; j < grid.n_points; ++j) {
    diff = std::max(diff, std::abs(d.values[j] - expected.values[j]));
  }
  CHECK(diff <= 1e-9 * expected.max_value());
}

TEST_CASE("identical covariates weight the responses equally") {
  const Matrix x = matrix_from({{2.0}, {2.0}, {2.0}});
  const std::vector<double> y{0.0, 1.0, 2.0};
  const YGrid grid{-3.0, 5.0, 1024};
  const CdeModel model = fit_cde(x, y, 3, grid, 1);
  const GridDensity d = eval_density(model, std::vector<double>{2.0});

  std::vector<double> expected_values(grid.n_points, 0.0);
  for (double mu : y) {
    for (int j = 0; j < grid.n_points; ++j) {
      expected_values[j] += test::normal_pdf(grid.point(j), mu, model.h_y) / 3.0;
    }
  }
  GridDensity expected(grid, std::move(expected_values));
  expected.normalize();
  double diff = 0.0;
  for (int j = 0; j < grid.n_points; ++j) {
    diff = std::max(diff, std::abs(d.values[j] - expected.values[j]));
  }
  CHECK(diff <= 1e-9 * expected.max_value());
}

TEST_CASE("simple benchmark density at the center shows three modes") {
  const Dataset data = gen_simple(800, 42);
  const YGrid grid = make_grid(data.y, 1024, 3.0);
  const CdeModel model = fit_cde(data.x, data.y, 100, grid, 7);
  const GridDensity d = eval_density(model, std::vector<double>(data.dim(), 0.0));

  const auto modes = test::find_modes(d.values, 0.10);
  REQUIRE(modes.size() == 3);
  const std::vector<double> expected{0.0, 1.0, 2.0};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(grid.point(modes[i]) - expected[i]) <= 0.35);
  }
}

TEST_CASE("density output is normalized and nonnegative") {
  const Dataset data = gen_simple(300, 5);
  const YGrid grid = make_grid(data.y, 512, 3.0);
  const CdeModel model = fit_cde(data.x, data.y, 40, grid, 9);
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x(data.dim());
    for (double& v : x) v = rng.uniform(-1.5, 1.5);
    const GridDensity d = eval_density(model, x);
    CHECK(d.integral() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*std::min_element(d.values.begin(), d.values.end()) >= 0.0);
  }
}

TEST_CASE("evaluation is invariant to training order") {
  const Dataset data = gen_simple(200, 11);
  const YGrid grid = make_grid(data.y, 256, 3.0);
  const CdeModel model = fit_cde(data.x, data.y, 30, grid, 77);

  // shuffle rows and refit with the same seed
  std::vector<int> perm(data.n());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(5);
  rng.shuffle(perm);
  Matrix shuffled_x(data.n(), data.dim());
  std::vector<double> shuffled_y(data.n());
  for (int i = 0; i < data.n(); ++i) {
    shuffled_y[i] = data.y[perm[i]];
    std::copy(data.x.row(perm[i]).begin(), data.x.row(perm[i]).end(),
              shuffled_x.row(i).begin());
  }
  const CdeModel model2 = fit_cde(shuffled_x, shuffled_y, 30, grid, 77);

  Rng probe(21);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> x(data.dim());
    for (double& v : x) v = probe.uniform(-2.0, 2.0);
    const GridDensity a = eval_density(model, x);
    const GridDensity b = eval_density(model2, x);
    for (int j = 0; j < grid.n_points; ++j) CHECK(a.values[j] == b.values[j]);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  const Dataset data = gen_simple(100, 2);
  const YGrid grid = make_grid(data.y, 256, 3.0);
  const CdeModel model = fit_cde(data.x, data.y, 10, grid, 1);
  CHECK_THROWS_AS(eval_density(model, std::vector<double>{0.0}), InvalidInput);
}
