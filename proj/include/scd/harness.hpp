#pragma once

#include <array>
#include <functional>
#include <string>

#include "scd/datagen.hpp"
#include "scd/scd_split.hpp"

namespace scd {

struct TrialMetrics {
  double coverage = 0.0;
  double mean_length = 0.0;
  double mean_count = 0.0;
};

struct Stat {
  double mean = 0.0;
  double sd = 0.0;  // sample sd, denominator trials-1
};

Stat summarize(std::span<const double> values);

using Predictor = std::function<IntervalSet(std::span<const double>)>;

// Coverage is closed-interval membership of the true response.
TrialMetrics evaluate(const Predictor& predictor, const Dataset& test);

enum class DatasetKind { simple, complex_mixture, csv };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::simple;
  std::string csv_path;
  std::string csv_target;
  int csv_max_rows = 0;  // 0 = all rows

  std::string label() const;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<std::string> methods{"vanilla_cp", "cqr",       "dist_split",
                                   "cd_split",   "hpd_split", "scd_split"};
  double alpha = 0.1;
  int n_cp = 2000;    // samples for train/validation/calibration
  int n_test = 5000;  // evaluation samples
  int trials = 10;
  ScdConfig scd;
  std::uint64_t seed = 7;
  std::string dump_path;  // optional per-point dump (empty = off)
  int threads = 0;        // 0 = SCD_THREADS env or hardware concurrency
};

const std::vector<std::string>& known_methods();

struct MethodSummary {
  std::string method;
  Stat coverage, length, count;
  std::vector<TrialMetrics> trials;
};

struct ExperimentResult {
  std::string dataset_label;
  int trials = 0;
  double alpha = 0.1;
  std::vector<MethodSummary> methods;

  const MethodSummary& row(const std::string& method) const;
  std::string to_csv() const;
  std::string to_table() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Fixed-sigma sweep; the sigma = 0 row is CD-split. Skips the validation step.
struct SigmaRow {
  double sigma = 0.0;
  std::string label;
  Stat coverage, length, count;
  std::vector<TrialMetrics> trials;
};

struct SigmaAblationResult {
  std::string dataset_label;
  int trials = 0;
  std::vector<SigmaRow> rows;

  std::string to_csv() const;
  std::string to_table() const;
};

SigmaAblationResult ablate_sigma(const ExperimentConfig& config,
                                 const std::vector<double>& sigmas);

// Validation-loss table: all four losses per sigma plus the selected
// sigma-hat per loss kind per trial.
struct LossAblationResult {
  std::string dataset_label;
  int trials = 0;
  std::vector<double> sigmas;
  std::array<std::vector<Stat>, 4> losses;             // [kind][sigma]
  std::array<std::vector<double>, 4> chosen_sigma;     // [kind][trial]

  std::string to_csv() const;
  std::string to_table() const;
};

LossAblationResult ablate_loss(const ExperimentConfig& config, const std::vector<double>& sigmas);

const char* loss_kind_name(ValidationLossKind kind);

}  // namespace scd
