#include "scd/scd_split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// seed streams
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kKmeansStream = 3;
constexpr std::uint64_t kJitterStream = 0x100;

std::vector<GridDensity> densities_for(const CdeModel& cde, const Matrix& x) {
  std::vector<GridDensity> out;
  out.reserve(x.rows);
  for (int i = 0; i < x.rows; ++i) out.push_back(eval_density(cde, x.row(i)));
  return out;
}

}  // namespace

double validation_loss(std::span<const double> counts, double k_target, ValidationLossKind kind) {
  if (counts.empty()) throw InvalidInput("validation_loss: empty counts");
  switch (kind) {
    case ValidationLossKind::global_l1:
      return std::abs(mean_of(counts) - k_target);
    case ValidationLossKind::global_l2: {
      const double d = mean_of(counts) - k_target;
      return d * d;
    }
    case ValidationLossKind::mae: {
      double s = 0.0;
      for (double c : counts) s += std::abs(c - k_target);
      return s / static_cast<double>(counts.size());
    }
    case ValidationLossKind::mse: {
      double s = 0.0;
      for (double c : counts) s += (c - k_target) * (c - k_target);
      return s / static_cast<double>(counts.size());
    }
  }
  throw InvalidInput("validation_loss: unknown loss kind");
}

void ScdConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("ScdConfig: alpha outside (0,1)");
  if (k_target < 1.0) throw InvalidInput("ScdConfig: k_target must be >= 1");
  for (double f : split_fractions) {
    if (f < 0.1) throw InvalidInput("ScdConfig: each split fraction must be >= 0.1");
  }
  if (std::abs(split_fractions[0] + split_fractions[1] + split_fractions[2] - 1.0) > 1e-9) {
    throw InvalidInput("ScdConfig: split fractions must sum to 1");
  }
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    if (sigma_grid[i] < 0.0 || !std::isfinite(sigma_grid[i])) {
      throw InvalidInput("ScdConfig: sigma grid values must be finite and >= 0");
    }
    if (i > 0 && sigma_grid[i] <= sigma_grid[i - 1]) {
      throw InvalidInput("ScdConfig: sigma grid must be strictly ascending");
    }
  }
  if (grid_points < 2) throw InvalidInput("ScdConfig: grid_points must be >= 2");
  if (z_points < 2) throw InvalidInput("ScdConfig: z_points must be >= 2");
  if (cde_neighbors < 2) throw InvalidInput("ScdConfig: cde_neighbors must be >= 2");
}

std::vector<double> default_sigma_grid(double grid_span) {
  std::vector<double> grid{0.0};
  const double lo = 0.01 * grid_span;
  const double hi = 0.5 * grid_span;
  const int count = 10;
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    grid.push_back(lo * std::pow(hi / lo, t));
  }
  return grid;
}

int default_cluster_count(int n_cal) { return std::max(1, std::min(10, n_cal / 100)); }

CellCalibration build_cell_calibration(std::span<const GridDensity> train_raw,
                                       std::span<const GridDensity> cal_raw,
                                       std::span<const double> cal_y, const SmoothParams& smooth,
                                       double alpha, int j_cells, int z_points, int lloyd_iters,
                                       std::uint64_t seed) {
  if (train_raw.empty()) throw InvalidInput("build_cell_calibration: no training densities");
  if (cal_raw.size() != cal_y.size()) {
    throw InvalidInput("build_cell_calibration: calibration size mismatch");
  }

  std::vector<GridDensity> train_smooth;
  train_smooth.reserve(train_raw.size());
  double max_density = 0.0;
  for (const GridDensity& raw : train_raw) {
    train_smooth.push_back(smooth_density(raw, smooth));
    max_density = std::max(max_density, train_smooth.back().max_value());
  }
  const double z_max = 1.05 * max_density;

  std::vector<Profile> train_profiles;
  train_profiles.reserve(train_smooth.size());
  for (const GridDensity& d : train_smooth) {
    train_profiles.push_back(compute_profile(d, z_max, z_points));
  }

  CellCalibration cells;
  cells.smooth = smooth;
  cells.partition =
      kmeanspp_fit(train_profiles, j_cells, lloyd_iters, mix_seed(seed, kKmeansStream));

  std::vector<ScoreSample> cell_scores(j_cells, ScoreSample{{}, ScoreKind::density});
  for (std::size_t i = 0; i < cal_raw.size(); ++i) {
    const GridDensity smoothed = smooth_density(cal_raw[i], smooth);
    const Profile profile = compute_profile(smoothed, z_max, z_points);
    const int cell = assign_cell(cells.partition, profile);
    cell_scores[cell].values.push_back(smoothed.value_at(cal_y[i]));
  }

  cells.thresholds.resize(j_cells);
  for (int c = 0; c < j_cells; ++c) {
    if (cell_scores[c].values.empty()) {
      cells.thresholds[c] = -kInf;
      cells.empty_cells.push_back(c);
      continue;
    }
    apply_tie_jitter(cell_scores[c].values, alpha, mix_seed(seed, kJitterStream + c));
    cells.thresholds[c] = lower_quantile(cell_scores[c].values, alpha);
  }
  return cells;
}

GridDensity smoothed_density(const GridDensity& raw_density, const CellCalibration& cells) {
  return smooth_density(raw_density, cells.smooth);
}

IntervalSet predict_with_cells(const GridDensity& raw_density, const CellCalibration& cells) {
  const GridDensity smoothed = smoothed_density(raw_density, cells);
  const Profile profile =
      compute_profile(smoothed, cells.partition.z_max, cells.partition.z_points);
  const int cell = assign_cell(cells.partition, profile);
  return superlevel_intervals(smoothed, cells.thresholds[cell]);
}

DensitySplitModel fit_density_split(std::shared_ptr<const CdeModel> cde, const Matrix& cal_x,
                                    std::span<const double> cal_y, double alpha, int j_cells,
                                    std::uint64_t seed, double sigma, SmoothPath path,
                                    double kernel_truncation, int z_points, int lloyd_iters) {
  if (!cde) throw InvalidInput("fit_density_split: null density model");
  const SmoothParams smooth{sigma, kernel_truncation, path};
  const auto train_raw = densities_for(*cde, cde->x);
  const auto cal_raw = densities_for(*cde, cal_x);
  DensitySplitModel model;
  model.cde = std::move(cde);
  model.cells = build_cell_calibration(train_raw, cal_raw, cal_y, smooth, alpha, j_cells,
                                       z_points, lloyd_iters, seed);
  return model;
}

IntervalSet DensitySplitModel::predict(std::span<const double> x) const {
  return predict_with_cells(eval_density(*cde, x), cells);
}

IntervalSet ScdModel::predict(std::span<const double> x) const {
  return predict_with_cells(eval_density(*cde, x), cells);
}

std::array<Dataset, 3> scd_split_parts(const Dataset& data, const ScdConfig& config) {
  return three_way_split(data, config.split_fractions, mix_seed(config.seed, kSplitStream));
}

ScdModel fit_scd(const Dataset& data, const ScdConfig& config, ScdValidationTrace* trace) {
  config.validate();
  if (data.n() < 60) throw InvalidInput("fit_scd: need at least 60 samples");

  const auto parts = scd_split_parts(data, config);
  const Dataset& train = parts[0];
  const Dataset& validation = parts[1];
  const Dataset& calibration = parts[2];

  const YGrid grid = make_grid(train.y, config.grid_points, config.grid_margin_sds);
  const int k = std::min(config.cde_neighbors, train.n());
  auto cde = std::make_shared<const CdeModel>(
      fit_cde(train.x, train.y, k, grid, mix_seed(config.seed, kCdeSeedStream)));

  const auto train_raw = densities_for(*cde, cde->x);
  const auto cal_raw = densities_for(*cde, calibration.x);
  const auto val_raw = densities_for(*cde, validation.x);

  const std::vector<double> sigmas =
      config.sigma_grid.empty() ? default_sigma_grid(grid.span()) : config.sigma_grid;
  const int j_cells =
      config.clusters > 0 ? config.clusters : default_cluster_count(calibration.n());

  ScdModel model;
  model.cde = cde;
  model.config = config;
  model.sigma_grid_used = sigmas;
  model.sigma_losses.resize(sigmas.size());
  if (trace) {
    trace->sigmas = sigmas;
    trace->counts.assign(sigmas.size(), {});
  }

  double best_loss = kInf;
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    const SmoothParams smooth{sigmas[s], config.kernel_truncation, config.smoothing_path};
    CellCalibration cells =
        build_cell_calibration(train_raw, cal_raw, calibration.y, smooth, config.alpha, j_cells,
                               config.z_points, config.lloyd_iters, config.seed);

    std::vector<double> counts(val_raw.size());
    for (std::size_t i = 0; i < val_raw.size(); ++i) {
      counts[i] = static_cast<double>(predict_with_cells(val_raw[i], cells).count());
    }
    const double loss = validation_loss(counts, config.k_target, config.loss);
    model.sigma_losses[s] = loss;
    if (trace) trace->counts[s] = counts;

    // strict improvement keeps the smallest sigma on ties
    if (loss < best_loss) {
      best_loss = loss;
      model.sigma_hat = sigmas[s];
      model.cells = std::move(cells);
    }
  }
  return model;
}

}  // namespace scd
