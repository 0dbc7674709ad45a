#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "scd/smoothing.hpp"

using namespace scd;

namespace {

const YGrid kGrid{-6.0, 6.0, 1024};

}  // namespace

TEST_CASE("sigma zero is the identity on both paths") {
  const GridDensity d = test::gaussian_density(kGrid, 0.4, 0.8);
  const GridDensity a = gaussian_convolve(d, {0.0, 6.0, SmoothPath::spatial});
  const GridDensity b = fourier_smooth(d, {0.0, 6.0, SmoothPath::spectral});
  for (int j = 0; j < kGrid.n_points; ++j) {
    CHECK(a.values[j] == d.values[j]);
    CHECK(std::abs(b.values[j] - d.values[j]) <= 1e-9);
  }
}

TEST_CASE("negative sigma is rejected") {
  const GridDensity d = test::gaussian_density(kGrid, 0.0, 1.0);
  CHECK_THROWS_AS(gaussian_convolve(d, {-0.1, 6.0, SmoothPath::spatial}), InvalidInput);
  CHECK_THROWS_AS(fourier_smooth(d, {-0.1, 6.0, SmoothPath::spectral}), InvalidInput);
  CHECK_THROWS_AS(gaussian_convolve(d, {1.0, 2.0, SmoothPath::spatial}), InvalidInput);
}

TEST_CASE("convolving a delta bump reproduces the kernel") {
  std::vector<double> values(kGrid.n_points, 0.0);
  const int center = 511;
  values[center] = 1.0;
  GridDensity delta(kGrid, std::move(values));
  delta.normalize();

  const double sigma = 0.5;
  const GridDensity out = gaussian_convolve(delta, {sigma, 6.0, SmoothPath::spatial});
  const double y0 = kGrid.point(center);
  double max_diff = 0.0;
  for (int j = 0; j < kGrid.n_points; ++j) {
    max_diff = std::max(max_diff, std::abs(out.values[j] - test::normal_pdf(kGrid.point(j), y0, sigma)));
  }
  CHECK(max_diff <= 1e-3);
}

TEST_CASE("constants stay constant away from the boundary") {
  GridDensity d(kGrid, std::vector<double>(kGrid.n_points, 1.0));
  d.normalize();
  for (double sigma : {0.2, 0.7, 1.5}) {
    const GridDensity out = gaussian_convolve(d, {sigma, 6.0, SmoothPath::spatial});
    const int guard = static_cast<int>(std::ceil(6.5 * sigma / kGrid.step()));
    double lo = 1e300, hi = -1e300;
    for (int j = guard; j < kGrid.n_points - guard; ++j) {
      lo = std::min(lo, out.values[j]);
      hi = std::max(hi, out.values[j]);
    }
    CHECK(hi - lo <= 1e-6);
  }
}

TEST_CASE("spectral filter attenuates a single frequency exactly") {
  // density = level + cosine; the fitted amplitude-to-level ratio scales by
  // exp(-2 pi^2 sigma^2 w0^2) (renormalization cancels in the ratio)
  const double w0 = 0.5;  // cycles per response unit
  const double rel_amp = 0.5;
  std::vector<double> values(kGrid.n_points);
  for (int j = 0; j < kGrid.n_points; ++j) {
    values[j] = 1.0 + rel_amp * std::cos(2.0 * std::numbers::pi * w0 * kGrid.point(j));
  }
  GridDensity d(kGrid, std::move(values));
  d.normalize();

  const double sigma = 0.5;
  const GridDensity out = fourier_smooth(d, {sigma, 6.0, SmoothPath::spectral});

  // least squares fit of level + a cos + b sin on the interior 40%
  const int lo = static_cast<int>(0.3 * kGrid.n_points);
  const int hi = static_cast<int>(0.7 * kGrid.n_points);
  double s1 = 0, sc = 0, ss = 0, scc = 0, sss = 0, ssc = 0, sy = 0, syc = 0, sys = 0;
  for (int j = lo; j < hi; ++j) {
    const double phase = 2.0 * std::numbers::pi * w0 * kGrid.point(j);
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    const double y = out.values[j];
    s1 += 1;
    sc += c;
    ss += s;
    scc += c * c;
    sss += s * s;
    ssc += s * c;
    sy += y;
    syc += y * c;
    sys += y * s;
  }
  // solve the 3x3 normal equations by Cramer's rule
  const double a11 = s1, a12 = sc, a13 = ss;
  const double a22 = scc, a23 = ssc, a33 = sss;
  const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                     a13 * (a12 * a23 - a22 * a13);
  const double level = (sy * (a22 * a33 - a23 * a23) - a12 * (syc * a33 - a23 * sys) +
                        a13 * (syc * a23 - a22 * sys)) /
                       det;
  const double amp_c = (a11 * (syc * a33 - sys * a23) - sy * (a12 * a33 - a23 * a13) +
                        a13 * (a12 * sys - syc * a13)) /
                       det;
  const double amp_s = (a11 * (a22 * sys - syc * a23) - a12 * (a12 * sys - syc * a13) +
                        sy * (a12 * a23 - a22 * a13)) /
                       det;

  const double expected = rel_amp * std::exp(-2.0 * std::numbers::pi * std::numbers::pi * sigma *
                                             sigma * w0 * w0);
  CHECK(amp_c / level == doctest::Approx(expected).epsilon(1e-6));
  CHECK(std::abs(amp_s / level) <= 1e-8);
}

TEST_CASE("spectral and spatial paths agree in the interior") {
  const GridDensity d =
      test::mixture_density(kGrid, {-2.5, 0.5, 2.0}, {0.4, 0.7, 0.3}, {0.3, 0.4, 0.3});
  const int lo = kGrid.n_points / 20;
  const int hi = kGrid.n_points - kGrid.n_points / 20;
  for (double mult : {0.1, 0.5, 1.0, 2.0}) {
    const double sigma = mult * kGrid.span() / 20.0;
    const GridDensity a = fourier_smooth(d, {sigma, 6.0, SmoothPath::spectral});
    const GridDensity b = gaussian_convolve(d, {sigma, 6.0, SmoothPath::spatial});
    double diff = 0.0;
    for (int j = lo; j < hi; ++j) diff = std::max(diff, std::abs(a.values[j] - b.values[j]));
    CHECK(diff <= 1e-6);
  }
}

TEST_CASE("randomized smoothing of a constant is exact") {
  const YGrid grid{-2.0, 2.0, 64};
  const auto out = randomized_smooth([](double) { return 3.25; }, 0.7, 50, 99, grid);
  for (double v : out) CHECK(v == doctest::Approx(3.25).epsilon(1e-15));
}

TEST_CASE("randomized smoothing of a linear function stays within the CLT band") {
  const YGrid grid{-2.0, 2.0, 64};
  const double sigma = 0.5;
  const int n = 100000;
  const auto out = randomized_smooth([](double x) { return x; }, sigma, n, 1234, grid);
  const double band = 4.0 * sigma / std::sqrt(static_cast<double>(n));
  int violations = 0;
  for (int j = 0; j < grid.n_points; ++j) {
    if (std::abs(out[j] - grid.point(j)) > band) ++violations;
  }
  CHECK(violations <= 1);  // pointwise violation probability is ~6e-5
}

TEST_CASE("randomized smoothing validates parameters") {
  const YGrid grid{-1.0, 1.0, 16};
  const auto f = [](double x) { return x; };
  CHECK_THROWS_AS(randomized_smooth(f, 0.0, 10, 1, grid), InvalidInput);
  CHECK_THROWS_AS(randomized_smooth(f, 1.0, 0, 1, grid), InvalidInput);
}

TEST_CASE("sign_variations strips zeros before counting") {
  CHECK(sign_variations(std::vector<double>{1.0, -1.0, 1.0}) == 2);
  CHECK(sign_variations(std::vector<double>{1.0, 0.0, 0.0, 1.0}) == 0);
  CHECK(sign_variations(std::vector<double>{0.0, 0.0, 0.0}) == 0);
  CHECK(sign_variations(std::vector<double>{-2.0, 0.0, 3.0, -1.0}) == 2);
  CHECK(sign_variations(std::vector<double>{}) == 0);
}

TEST_CASE("smoothing preserves mass and nonnegativity") {
  const GridDensity d = test::mixture_density(kGrid, {-1.0, 2.0}, {0.3, 0.5}, {0.6, 0.4});
  for (double sigma : {0.1, 0.6, 2.4}) {
    for (SmoothPath path : {SmoothPath::spectral, SmoothPath::spatial}) {
      const GridDensity out = smooth_density(d, {sigma, 6.0, path});
      CHECK(out.integral() == doctest::Approx(1.0).epsilon(1e-9));
      for (double v : out.values) CHECK(v >= 0.0);
    }
  }
}
