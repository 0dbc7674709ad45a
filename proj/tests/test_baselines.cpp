#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "scd/baselines.hpp"
#include "scd/datagen.hpp"

using namespace scd;

namespace {

// y = 2*x1 + noise, d = 2
Dataset linear_dataset(int n, double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.x = Matrix(n, 2);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    d.x.at(i, 0) = rng.uniform(-2.0, 2.0);
    d.x.at(i, 1) = rng.uniform(-2.0, 2.0);
    d.y[i] = 2.0 * d.x.at(i, 0) + (noise_sd > 0.0 ? rng.normal(0.0, noise_sd) : 0.0);
  }
  return d;
}

}  // namespace

TEST_CASE("vanilla CP with zero residuals returns a point interval") {
  Dataset data;
  data.x = Matrix(40, 1);
  data.y.assign(40, 1.25);
  Rng rng(1);
  for (int i = 0; i < 40; ++i) data.x.at(i, 0) = rng.uniform(-1.0, 1.0);

  const Dataset train = dataset_slice(data, 0, 20);
  const Dataset cal = dataset_slice(data, 20, 20);
  const auto model = VanillaCp::fit(train.x, train.y, cal.x, cal.y, 0.1, 5);
  CHECK(model.margin() == 0.0);
  const IntervalSet set = model.predict(std::vector<double>{0.3});
  CHECK(set.count() == 1);
  CHECK(set.total_length() == 0.0);
  CHECK(set.contains(1.25));
}

TEST_CASE("vanilla CP always yields one interval") {
  const Dataset data = linear_dataset(300, 0.3, 5);
  const Dataset train = dataset_slice(data, 0, 150);
  const Dataset cal = dataset_slice(data, 150, 150);
  const auto model = VanillaCp::fit(train.x, train.y, cal.x, cal.y, 0.1, 30);
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const std::vector<double> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    CHECK(model.predict(x).count() == 1);
  }
}

TEST_CASE("CQR with calibrated quantiles needs almost no correction") {
  // responses uniform on [0,1] independent of x: the 5%/95% k-NN quantile
  // curves are already near-calibrated
  Rng rng(11);
  Dataset data;
  const int n = 2000;
  data.x = Matrix(n, 1);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.x.at(i, 0) = rng.uniform(-1.0, 1.0);
    data.y[i] = rng.uniform01();
  }
  const Dataset train = dataset_slice(data, 0, 1000);
  const Dataset cal = dataset_slice(data, 1000, 1000);
  const auto model = CqrModel::fit(train.x, train.y, cal.x, cal.y, 0.1, 400);
  CHECK(std::abs(model.correction()) <= 0.05);
  const IntervalSet set = model.predict(std::vector<double>{0.0});
  REQUIRE(set.count() == 1);
  CHECK(set.intervals()[0].lo > -0.15);
  CHECK(set.intervals()[0].lo < 0.20);
  CHECK(set.intervals()[0].hi > 0.80);
  CHECK(set.intervals()[0].hi < 1.15);
}

TEST_CASE("dist-split bounds follow the two-sided order statistics") {
  const Dataset data = gen_simple(1200, 3);
  const Dataset train = dataset_slice(data, 0, 201);
  const Dataset cal = dataset_slice(data, 201, 999);
  const YGrid grid = make_grid(train.y, 512, 3.0);
  const auto cde =
      std::make_shared<const CdeModel>(fit_cde(train.x, train.y, 50, grid, 7));
  const auto model = DistSplitModel::fit(cde, cal.x, cal.y, 0.1);

  // recompute the scores independently and check the picked order statistics
  std::vector<double> u(cal.n());
  for (int i = 0; i < cal.n(); ++i) {
    const GridDensity density = eval_density(*cde, cal.x.row(i));
    u[i] = interpolate_cdf(density.grid, density_cdf(density), cal.y[i]);
  }
  std::sort(u.begin(), u.end());
  // m = 999, alpha = 0.1: floor(0.05*1000) = 50, ceil(0.95*1000) = 950
  const auto [q_lo, q_hi] = model.cdf_bounds();
  CHECK(q_lo == u[49]);
  CHECK(q_hi == u[949]);

  Rng rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x(data.dim());
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    CHECK(model.predict(x).count() == 1);
  }
}

TEST_CASE("dist-split brackets the known conditional quantiles") {
  // y ~ N(0,1) independent of x; the oracle interval is [-1.645, 1.645]
  Rng rng(21);
  Dataset data;
  const int n = 4000;
  data.x = Matrix(n, 1);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.x.at(i, 0) = rng.uniform(-1.0, 1.0);
    data.y[i] = rng.normal();
  }
  const Dataset train = dataset_slice(data, 0, 2000);
  const Dataset cal = dataset_slice(data, 2000, 2000);
  const YGrid grid = make_grid(train.y, 512, 3.0);
  const auto cde =
      std::make_shared<const CdeModel>(fit_cde(train.x, train.y, 500, grid, 7));
  const auto model = DistSplitModel::fit(cde, cal.x, cal.y, 0.1);
  const IntervalSet set = model.predict(std::vector<double>{0.0});
  REQUIRE(set.count() == 1);
  CHECK(set.intervals()[0].lo == doctest::Approx(-1.6449).epsilon(0.12));
  CHECK(set.intervals()[0].hi == doctest::Approx(1.6449).epsilon(0.12));
}

TEST_CASE("HPD set of a unimodal density is a single interval of the right mass") {
  const YGrid grid{-6.0, 6.0, 1024};
  const GridDensity d = test::gaussian_density(grid, 0.3, 0.9);
  for (double target : {0.5, 0.9, 0.99}) {
    const IntervalSet set = superlevel_intervals(d, level_for_hpd_mass(d, target));
    REQUIRE(set.count() == 1);
    const auto cdf = density_cdf(d);
    const double mass = interpolate_cdf(grid, cdf, set.intervals()[0].hi) -
                        interpolate_cdf(grid, cdf, set.intervals()[0].lo);
    CHECK(mass == doctest::Approx(target).epsilon(0.01));
  }
}

TEST_CASE("fitted HPD-split sets capture the threshold's worth of mass") {
  const Dataset data = linear_dataset(2000, 0.4, 31);
  const Dataset train = dataset_slice(data, 0, 1000);
  const Dataset cal = dataset_slice(data, 1000, 1000);
  const YGrid grid = make_grid(train.y, 512, 3.0);
  const auto cde =
      std::make_shared<const CdeModel>(fit_cde(train.x, train.y, 100, grid, 5));
  const auto model = HpdSplitModel::fit(cde, cal.x, cal.y, 0.1, 77);

  CHECK(model.mass_threshold() >= 0.0);
  CHECK(model.mass_threshold() <= 1.0);

  Rng rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const std::vector<double> x{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    const GridDensity density = eval_density(*cde, x);
    const IntervalSet set = model.predict(x);
    REQUIRE(set.count() >= 1);
    // the extracted set holds exactly the threshold's worth of estimated mass
    double mass = 0.0;
    for (const Interval& iv : set.intervals()) {
      const auto cdf = density_cdf(density);
      mass += interpolate_cdf(grid, cdf, iv.hi) - interpolate_cdf(grid, cdf, iv.lo);
    }
    CHECK(mass == doctest::Approx(model.mass_threshold()).epsilon(0.02));
  }
}

TEST_CASE("HPD-split goes multimodal on the complex benchmark") {
  const Dataset data = gen_complex(2600, 12);
  const Dataset train = dataset_slice(data, 0, 1200);
  const Dataset cal = dataset_slice(data, 1200, 800);
  const Dataset test = dataset_slice(data, 2000, 600);
  const YGrid grid = make_grid(train.y, 1024, 3.0);
  const auto cde =
      std::make_shared<const CdeModel>(fit_cde(train.x, train.y, 100, grid, 5));
  const auto model = HpdSplitModel::fit(cde, cal.x, cal.y, 0.1, 77);

  double count = 0.0;
  for (int i = 0; i < test.n(); ++i) count += model.predict(test.x.row(i)).count();
  CHECK(count / test.n() > 1.0);
}

TEST_CASE("hpd level inversion matches the mass function") {
  const YGrid grid{-6.0, 6.0, 1024};
  const GridDensity d = test::mixture_density(grid, {-2.0, 2.0}, {0.6, 0.8}, {0.5, 0.5});
  for (double target : {0.25, 0.5, 0.9}) {
    const double level = level_for_hpd_mass(d, target);
    CHECK(mass_at_or_above(d, level) <= target + 1e-6);
    // one ulp below the level the mass exceeds the target
    CHECK(mass_at_or_above(d, level * (1.0 - 1e-9)) >= target - 1e-6);
  }
}
