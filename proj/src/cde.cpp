#include "scd/cde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scd {

namespace {

// Total order over rows: by response, then covariates lexicographically.
// Equal rows stay interchangeable, so any input permutation maps to the
// same stored model.
std::vector<int> canonical_order(const Matrix& x, std::span<const double> y) {
  std::vector<int> idx(y.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (y[a] != y[b]) return y[a] < y[b];
    const auto ra = x.row(a);
    const auto rb = x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return idx;
}

std::vector<int> seeded_subsample(int n, int size, std::uint64_t seed) {
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  Rng rng(seed);
  rng.shuffle(pool);
  pool.resize(std::min(n, size));
  return pool;
}

double median_of(std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

double median_pairwise_distance(const Matrix& x, std::uint64_t seed) {
  const auto pool = seeded_subsample(x.rows, 256, seed);
  const int sub = static_cast<int>(pool.size());
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(sub) * (sub - 1) / 2);
  for (int i = 0; i < sub; ++i) {
    for (int j = i + 1; j < sub; ++j) {
      dists.push_back(std::sqrt(squared_distance(x.row(pool[i]), x.row(pool[j]))));
    }
  }
  return median_of(dists);
}

// Conditional response scale: median |y_i - y_nn(i)| over a subsample, with
// nn(i) the nearest covariate neighbor. The 0.9539 factor (sqrt(2) times the
// standard normal upper quartile) makes the estimate consistent for the sd
// when responses are locally Gaussian. The marginal sd would badly
// over-smooth conditionals whose mean structure dominates the spread.
double local_response_scale(const Matrix& x, std::span<const double> y, std::uint64_t seed) {
  const int n = x.rows;
  if (n < 2) return 0.0;
  const auto pool = seeded_subsample(n, 256, seed);
  std::vector<double> diffs;
  diffs.reserve(pool.size());
  for (int i : pool) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = squared_distance(x.row(i), x.row(j));
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    diffs.push_back(std::abs(y[i] - y[best_j]));
  }
  return median_of(diffs) / 0.9539;
}

}  // namespace

CdeModel fit_cde(const Matrix& train_x, std::span<const double> train_y, int k,
                 const YGrid& grid, std::uint64_t seed) {
  const int n = train_x.rows;
  if (static_cast<std::size_t>(n) != train_y.size()) {
    throw InvalidInput("fit_cde: covariate/response count mismatch");
  }
  if (k < 2) throw InvalidInput("fit_cde: need k >= 2");
  if (n < k) throw InvalidInput("fit_cde: fewer training points than neighbors");
  if (!all_finite(train_x.data) || !all_finite(train_y)) {
    throw InvalidInput("fit_cde: non-finite training value");
  }

  CdeModel model;
  model.neighbors = k;
  model.grid = grid;
  model.x = Matrix(n, train_x.cols);
  model.y.resize(n);
  const auto order = canonical_order(train_x, train_y);
  for (int i = 0; i < n; ++i) {
    model.y[i] = train_y[order[i]];
    const auto src = train_x.row(order[i]);
    std::copy(src.begin(), src.end(), model.x.row(i).begin());
  }

  const double scale = local_response_scale(model.x, model.y, mix_seed(seed, 0x5ca1e));
  model.h_y = std::max(1.06 * scale * std::pow(static_cast<double>(n), -0.2),
                       1e-3 * grid.step());
  model.h_x = std::max(median_pairwise_distance(model.x, mix_seed(seed, 0xbadc0de)), 1e-6);
  return model;
}

GridDensity eval_density(const CdeModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.x.cols) {
    throw InvalidInput("eval_density: covariate dimension mismatch");
  }
  if (!all_finite(x)) throw InvalidInput("eval_density: non-finite covariate");

  const int n = model.x.rows;
  const int k = model.neighbors;
  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i) dist[i] = {squared_distance(x, model.x.row(i)), i};
  std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
  dist.resize(k);
  // canonical index order fixes the accumulation order for any input
  // permutation of the training data
  std::sort(dist.begin(), dist.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });

  double d2_min = dist[0].first;
  for (const auto& [d2, i] : dist) d2_min = std::min(d2_min, d2);

  const double inv_2hx2 = 0.5 / (model.h_x * model.h_x);
  const YGrid& grid = model.grid;
  const double h = grid.step();
  const double inv_hy = 1.0 / model.h_y;
  const int reach = static_cast<int>(std::ceil(8.0 * model.h_y / h));

  std::vector<double> values(grid.n_points, 0.0);
  double wsum = 0.0;
  for (const auto& [d2, i] : dist) {
    const double w = std::exp(-(d2 - d2_min) * inv_2hx2);
    wsum += w;
    const double yi = model.y[i];
    const int center = static_cast<int>(std::round((yi - grid.y_min) / h));
    const int j_lo = std::max(0, center - reach);
    const int j_hi = std::min(grid.n_points - 1, center + reach);
    for (int j = j_lo; j <= j_hi; ++j) {
      const double u = (grid.point(j) - yi) * inv_hy;
      values[j] += w * std::exp(-0.5 * u * u);
    }
  }
  if (wsum <= 0.0) throw InvalidState("eval_density: degenerate neighbor weights");

  GridDensity density(grid, std::move(values));
  density.normalize();
  return density;
}

}  // namespace scd
