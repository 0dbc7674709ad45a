#pragma once

#include <array>
#include <memory>

#include "scd/baselines.hpp"
#include "scd/cde.hpp"
#include "scd/conformal.hpp"
#include "scd/datagen.hpp"
#include "scd/partition.hpp"
#include "scd/smoothing.hpp"

namespace scd {

enum class ValidationLossKind { global_l1, global_l2, mae, mse };

// Loss between per-point interval counts and the target count.
double validation_loss(std::span<const double> counts, double k_target, ValidationLossKind kind);

struct ScdConfig {
  double alpha = 0.1;
  std::vector<double> sigma_grid;  // ascending, >= 0; empty selects the default grid
  double k_target = 2.0;
  ValidationLossKind loss = ValidationLossKind::global_l1;
  std::array<double, 3> split_fractions{0.4, 0.2, 0.4};  // train, validation, calibration
  int clusters = 0;                                      // 0 -> max(1, min(10, n_cal/100))
  int cde_neighbors = 100;
  int grid_points = 1024;
  double grid_margin_sds = 3.0;
  int z_points = 256;
  int lloyd_iters = 50;
  SmoothPath smoothing_path = SmoothPath::spectral;
  double kernel_truncation = 6.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// {0} plus 10 log-spaced values from 0.01 to 0.5 of the grid span.
std::vector<double> default_sigma_grid(double grid_span);
int default_cluster_count(int n_cal);

// Seed stream fit_scd derives for its density fit; callers that want a
// bit-identical standalone fit (e.g. a paired CD-split) reuse it.
inline constexpr std::uint64_t kCdeSeedStream = 2;

// Partition plus per-cell thresholds for one smoothing level.
struct CellCalibration {
  Partition partition;
  std::vector<double> thresholds;  // -inf for cells with no calibration points
  SmoothParams smooth;
  std::vector<int> empty_cells;
};

// Builds the partition from smoothed training profiles and calibrates one
// lower-quantile threshold per cell from the smoothed calibration scores.
CellCalibration build_cell_calibration(std::span<const GridDensity> train_raw,
                                       std::span<const GridDensity> cal_raw,
                                       std::span<const double> cal_y, const SmoothParams& smooth,
                                       double alpha, int j_cells, int z_points, int lloyd_iters,
                                       std::uint64_t seed);

// Smooth, locate the cell, apply its threshold, extract the superlevel set.
IntervalSet predict_with_cells(const GridDensity& raw_density, const CellCalibration& cells);

GridDensity smoothed_density(const GridDensity& raw_density, const CellCalibration& cells);

// Density-split conformal predictor at a fixed smoothing level;
// sigma = 0 is CD-split.
struct DensitySplitModel {
  std::shared_ptr<const CdeModel> cde;
  CellCalibration cells;

  IntervalSet predict(std::span<const double> x) const;
};

DensitySplitModel fit_density_split(std::shared_ptr<const CdeModel> cde, const Matrix& cal_x,
                                    std::span<const double> cal_y, double alpha, int j_cells,
                                    std::uint64_t seed, double sigma = 0.0,
                                    SmoothPath path = SmoothPath::spectral,
                                    double kernel_truncation = 6.0, int z_points = 256,
                                    int lloyd_iters = 50);

// The full pipeline: three-way split, density fit, per-sigma partition and
// provisional calibration, validation-driven sigma selection, final model.
struct ScdModel {
  std::shared_ptr<const CdeModel> cde;
  double sigma_hat = 0.0;
  CellCalibration cells;
  ScdConfig config;
  std::vector<double> sigma_grid_used;
  std::vector<double> sigma_losses;  // R(sigma) per candidate

  IntervalSet predict(std::span<const double> x) const;
};

// Per-sigma validation interval counts, for loss diagnostics.
struct ScdValidationTrace {
  std::vector<double> sigmas;
  std::vector<std::vector<double>> counts;
};

ScdModel fit_scd(const Dataset& data, const ScdConfig& config,
                 ScdValidationTrace* trace = nullptr);

// The split fit_scd performs internally (train, validation, calibration).
std::array<Dataset, 3> scd_split_parts(const Dataset& data, const ScdConfig& config);

}  // namespace scd
