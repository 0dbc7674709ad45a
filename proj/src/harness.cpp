#include "scd/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace scd {

namespace {

// matches fit_scd's density-fit stream so cd_split and scd_split share the fit
constexpr std::uint64_t kBaseCdeStream = kCdeSeedStream;
constexpr std::uint64_t kPoolStream = 21;

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

struct TrialData {
  Dataset cp;
  Dataset test;
};

TrialData make_trial_data(const ExperimentConfig& config, const Dataset* csv_pool,
                          std::uint64_t trial_seed) {
  const int total = config.n_cp + config.n_test;
  Dataset full;
  switch (config.dataset.kind) {
    case DatasetKind::simple:
      full = gen_simple(total, trial_seed);
      break;
    case DatasetKind::complex_mixture:
      full = gen_complex(total, trial_seed);
      break;
    case DatasetKind::csv: {
      if (csv_pool->n() < total) {
        throw InvalidInput("run_experiment: CSV has fewer rows than n_cp + n_test");
      }
      std::vector<int> order(csv_pool->n());
      for (int i = 0; i < csv_pool->n(); ++i) order[i] = i;
      Rng rng(mix_seed(trial_seed, kPoolStream));
      rng.shuffle(order);
      full.x = Matrix(total, csv_pool->dim());
      full.y.resize(total);
      full.feature_means = csv_pool->feature_means;
      full.feature_sds = csv_pool->feature_sds;
      for (int i = 0; i < total; ++i) {
        full.y[i] = csv_pool->y[order[i]];
        const auto row = csv_pool->x.row(order[i]);
        std::copy(row.begin(), row.end(), full.x.row(i).begin());
      }
      break;
    }
  }
  return {dataset_slice(full, 0, config.n_cp), dataset_slice(full, config.n_cp, config.n_test)};
}

bool wants(const std::vector<std::string>& methods, const std::string& name) {
  return std::find(methods.begin(), methods.end(), name) != methods.end();
}

std::string intervals_text(const IntervalSet& set) {
  std::string s;
  for (const Interval& iv : set.intervals()) {
    if (!s.empty()) s += '|';
    s += fmt(iv.lo, 4) + ':' + fmt(iv.hi, 4);
  }
  return s;
}

struct TrialOutput {
  std::vector<TrialMetrics> metrics;  // aligned with config.methods
  std::string dump;
};

TrialOutput run_one_trial(const ExperimentConfig& config, const Dataset* csv_pool, int t) {
  const std::uint64_t seed_t = config.seed + static_cast<std::uint64_t>(t);
  const TrialData data = make_trial_data(config, csv_pool, seed_t);

  ScdConfig scd_cfg = config.scd;
  scd_cfg.alpha = config.alpha;
  scd_cfg.seed = seed_t;

  // every method fits on the same training part and calibrates on the same
  // calibration part; the validation part is consumed only by sigma tuning
  const auto parts = scd_split_parts(data.cp, scd_cfg);
  const Dataset& train = parts[0];
  const Dataset& cal = parts[2];
  const int knn = std::min(scd_cfg.cde_neighbors, train.n());
  const int j_cells = scd_cfg.clusters > 0 ? scd_cfg.clusters : default_cluster_count(cal.n());

  const bool use_vanilla = wants(config.methods, "vanilla_cp");
  const bool use_cqr = wants(config.methods, "cqr");
  const bool use_dist = wants(config.methods, "dist_split");
  const bool use_cd = wants(config.methods, "cd_split");
  const bool use_hpd = wants(config.methods, "hpd_split");
  const bool use_scd = wants(config.methods, "scd_split");
  const bool use_base_cde = use_dist || use_cd || use_hpd;

  VanillaCp vanilla;
  if (use_vanilla) vanilla = VanillaCp::fit(train.x, train.y, cal.x, cal.y, config.alpha, knn);
  CqrModel cqr;
  if (use_cqr) cqr = CqrModel::fit(train.x, train.y, cal.x, cal.y, config.alpha, knn);

  std::shared_ptr<const CdeModel> base_cde;
  DistSplitModel dist;
  DensitySplitModel cd;
  HpdSplitModel hpd;
  if (use_base_cde) {
    const YGrid grid = make_grid(train.y, scd_cfg.grid_points, scd_cfg.grid_margin_sds);
    base_cde = std::make_shared<const CdeModel>(
        fit_cde(train.x, train.y, knn, grid, mix_seed(seed_t, kBaseCdeStream)));
    if (use_dist) dist = DistSplitModel::fit(base_cde, cal.x, cal.y, config.alpha);
    if (use_hpd) hpd = HpdSplitModel::fit(base_cde, cal.x, cal.y, config.alpha, seed_t);
    if (use_cd) {
      cd = fit_density_split(base_cde, cal.x, cal.y, config.alpha, j_cells, seed_t, 0.0,
                             scd_cfg.smoothing_path, scd_cfg.kernel_truncation, scd_cfg.z_points,
                             scd_cfg.lloyd_iters);
    }
  }
  ScdModel scd_model;
  if (use_scd) scd_model = fit_scd(data.cp, scd_cfg);

  struct Accum {
    long covered = 0;
    double length = 0.0;
    double count = 0.0;
  };
  std::vector<Accum> acc(config.methods.size());
  std::ostringstream dump;
  const bool dumping = !config.dump_path.empty();
  if (dumping) dump << "# trial " << t << " seed " << seed_t << "\n";

  std::shared_ptr<const CdeModel> scd_cde = use_scd ? scd_model.cde : nullptr;
  for (int i = 0; i < data.test.n(); ++i) {
    const auto x = data.test.x.row(i);
    const double y = data.test.y[i];

    GridDensity base_raw;
    if (use_base_cde) base_raw = eval_density(*base_cde, x);
    GridDensity scd_raw;
    if (use_scd) scd_raw = eval_density(*scd_cde, x);

    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      const std::string& name = config.methods[m];
      IntervalSet set;
      if (name == "vanilla_cp") {
        set = vanilla.predict(x);
      } else if (name == "cqr") {
        set = cqr.predict(x);
      } else if (name == "dist_split") {
        set = dist.predict_from(base_raw);
      } else if (name == "cd_split") {
        set = predict_with_cells(base_raw, cd.cells);
      } else if (name == "hpd_split") {
        set = hpd.predict_from(base_raw);
      } else {
        set = predict_with_cells(scd_raw, scd_model.cells);
      }
      acc[m].covered += set.contains(y) ? 1 : 0;
      acc[m].length += set.total_length();
      acc[m].count += set.count();
      if (dumping) {
        dump << t << ',' << name << ',' << i << ',' << fmt(y, 4) << ','
             << (set.contains(y) ? 1 : 0) << ',' << set.count() << ','
             << fmt(set.total_length(), 4) << ',' << intervals_text(set) << "\n";
      }
    }
  }

  TrialOutput out;
  out.metrics.resize(config.methods.size());
  const double n = data.test.n();
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    out.metrics[m] = {acc[m].covered / n, acc[m].length / n, acc[m].count / n};
  }
  out.dump = dump.str();
  return out;
}

Dataset load_csv_pool(const ExperimentConfig& config) {
  const DatasetSpec& spec = config.dataset;
  Dataset pool = load_csv(spec.csv_path, spec.csv_target,
                          spec.csv_max_rows > 0 ? std::optional<int>(spec.csv_max_rows)
                                                : std::nullopt,
                          mix_seed(config.seed, kPoolStream));
  return standardize(pool);
}

}  // namespace

Stat summarize(std::span<const double> values) {
  return {mean_of(values), sample_sd(values)};
}

TrialMetrics evaluate(const Predictor& predictor, const Dataset& test) {
  if (test.n() < 1) throw InvalidInput("evaluate: empty test set");
  long covered = 0;
  double length = 0.0;
  double count = 0.0;
  for (int i = 0; i < test.n(); ++i) {
    const IntervalSet set = predictor(test.x.row(i));
    covered += set.contains(test.y[i]) ? 1 : 0;
    length += set.total_length();
    count += set.count();
  }
  const double n = test.n();
  return {covered / n, length / n, count / n};
}

std::string DatasetSpec::label() const {
  switch (kind) {
    case DatasetKind::simple:
      return "simple";
    case DatasetKind::complex_mixture:
      return "complex";
    case DatasetKind::csv:
      return "csv:" + csv_path;
  }
  return "unknown";
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods{"vanilla_cp", "cqr",       "dist_split",
                                                "cd_split",   "hpd_split", "scd_split"};
  return methods;
}

const MethodSummary& ExperimentResult::row(const std::string& method) const {
  for (const MethodSummary& m : methods) {
    if (m.method == method) return m;
  }
  throw InvalidInput("ExperimentResult: no row for method " + method);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw InvalidInput("run_experiment: trials must be >= 1");
  if (config.n_test < 1) throw InvalidInput("run_experiment: n_test must be >= 1");
  if (config.methods.empty()) throw InvalidInput("run_experiment: no methods requested");
  for (const std::string& m : config.methods) {
    if (!wants(known_methods(), m)) {
      std::string valid;
      for (const auto& k : known_methods()) valid += (valid.empty() ? "" : ", ") + k;
      throw InvalidInput("run_experiment: unknown method '" + m + "' (valid: " + valid + ")");
    }
  }

  Dataset csv_pool;
  if (config.dataset.kind == DatasetKind::csv) csv_pool = load_csv_pool(config);

  std::vector<TrialOutput> outputs(config.trials);
  parallel_for(config.trials, resolve_threads(config.threads), [&](int t) {
    outputs[t] = run_one_trial(config, &csv_pool, t);
  });

  ExperimentResult result;
  result.dataset_label = config.dataset.label();
  result.trials = config.trials;
  result.alpha = config.alpha;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    MethodSummary summary;
    summary.method = config.methods[m];
    std::vector<double> cov(config.trials), len(config.trials), num(config.trials);
    for (int t = 0; t < config.trials; ++t) {
      summary.trials.push_back(outputs[t].metrics[m]);
      cov[t] = outputs[t].metrics[m].coverage;
      len[t] = outputs[t].metrics[m].mean_length;
      num[t] = outputs[t].metrics[m].mean_count;
    }
    summary.coverage = summarize(cov);
    summary.length = summarize(len);
    summary.count = summarize(num);
    result.methods.push_back(std::move(summary));
  }

  if (!config.dump_path.empty()) {
    std::ofstream out(config.dump_path);
    if (!out) throw InvalidInput("run_experiment: cannot open dump path " + config.dump_path);
    out << "trial,method,point,y,covered,count,length,intervals\n";
    for (const TrialOutput& o : outputs) out << o.dump;
  }
  return result;
}

namespace {

std::string stat_cell(const Stat& s, double scale, int digits) {
  return fmt(scale * s.mean, digits) + " +- " + fmt(scale * s.sd, digits);
}

}  // namespace

std::string ExperimentResult::to_csv() const {
  std::string s = "dataset,method,trials,cov_mean,cov_sd,len_mean,len_sd,num_mean,num_sd,note\n";
  for (const MethodSummary& m : methods) {
    s += dataset_label + ',' + m.method + ',' + std::to_string(trials) + ',' +
         fmt(m.coverage.mean) + ',' + fmt(m.coverage.sd) + ',' + fmt(m.length.mean) + ',' +
         fmt(m.length.sd) + ',' + fmt(m.count.mean) + ',' + fmt(m.count.sd) + ',' +
         (trials == 1 ? "single-trial" : "ok") + '\n';
  }
  return s;
}

std::string ExperimentResult::to_table() const {
  std::ostringstream out;
  out << "dataset: " << dataset_label << "   trials: " << trials << "   alpha: " << fmt(alpha, 3)
      << (trials == 1 ? "   (single trial: sd = 0)" : "") << "\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-12s %-20s %-20s %-20s\n", "method", "coverage (%)", "length",
                "intervals");
  out << buf;
  for (const MethodSummary& m : methods) {
    std::snprintf(buf, sizeof(buf), "%-12s %-20s %-20s %-20s\n", m.method.c_str(),
                  stat_cell(m.coverage, 100.0, 2).c_str(), stat_cell(m.length, 1.0, 2).c_str(),
                  stat_cell(m.count, 1.0, 2).c_str());
    out << buf;
  }
  return out.str();
}

SigmaAblationResult ablate_sigma(const ExperimentConfig& config,
                                 const std::vector<double>& sigmas) {
  if (sigmas.empty()) throw InvalidInput("ablate_sigma: empty sigma list");
  if (config.trials < 1) throw InvalidInput("ablate_sigma: trials must be >= 1");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (sigmas[i] < 0.0) throw InvalidInput("ablate_sigma: sigma must be >= 0");
    if (i > 0 && sigmas[i] <= sigmas[i - 1]) {
      throw InvalidInput("ablate_sigma: sigma list must be strictly ascending");
    }
  }

  Dataset csv_pool;
  if (config.dataset.kind == DatasetKind::csv) csv_pool = load_csv_pool(config);

  std::vector<std::vector<TrialMetrics>> per_trial(config.trials);
  parallel_for(config.trials, resolve_threads(config.threads), [&](int t) {
    const std::uint64_t seed_t = config.seed + static_cast<std::uint64_t>(t);
    const TrialData data = make_trial_data(config, &csv_pool, seed_t);

    ScdConfig scd_cfg = config.scd;
    scd_cfg.alpha = config.alpha;
    scd_cfg.seed = seed_t;

    const auto parts = scd_split_parts(data.cp, scd_cfg);
    const Dataset& train = parts[0];
    const Dataset& cal = parts[2];
    const int knn = std::min(scd_cfg.cde_neighbors, train.n());
    const int j_cells =
        scd_cfg.clusters > 0 ? scd_cfg.clusters : default_cluster_count(cal.n());

    const YGrid grid = make_grid(train.y, scd_cfg.grid_points, scd_cfg.grid_margin_sds);
    const auto cde = std::make_shared<const CdeModel>(
        fit_cde(train.x, train.y, knn, grid, mix_seed(seed_t, kBaseCdeStream)));

    std::vector<GridDensity> train_raw, cal_raw;
    train_raw.reserve(cde->x.rows);
    for (int i = 0; i < cde->x.rows; ++i) train_raw.push_back(eval_density(*cde, cde->x.row(i)));
    cal_raw.reserve(cal.n());
    for (int i = 0; i < cal.n(); ++i) cal_raw.push_back(eval_density(*cde, cal.x.row(i)));

    std::vector<CellCalibration> cells;
    cells.reserve(sigmas.size());
    for (double sigma : sigmas) {
      const SmoothParams smooth{sigma, scd_cfg.kernel_truncation, scd_cfg.smoothing_path};
      cells.push_back(build_cell_calibration(train_raw, cal_raw, cal.y, smooth, config.alpha,
                                             j_cells, scd_cfg.z_points, scd_cfg.lloyd_iters,
                                             seed_t));
    }

    std::vector<TrialMetrics> rows(sigmas.size());
    std::vector<long> covered(sigmas.size(), 0);
    std::vector<double> length(sigmas.size(), 0.0), count(sigmas.size(), 0.0);
    for (int i = 0; i < data.test.n(); ++i) {
      const GridDensity raw = eval_density(*cde, data.test.x.row(i));
      for (std::size_t s = 0; s < sigmas.size(); ++s) {
        const IntervalSet set = predict_with_cells(raw, cells[s]);
        covered[s] += set.contains(data.test.y[i]) ? 1 : 0;
        length[s] += set.total_length();
        count[s] += set.count();
      }
    }
    const double n = data.test.n();
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
      rows[s] = {covered[s] / n, length[s] / n, count[s] / n};
    }
    per_trial[t] = std::move(rows);
  });

  SigmaAblationResult result;
  result.dataset_label = config.dataset.label();
  result.trials = config.trials;
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    SigmaRow row;
    row.sigma = sigmas[s];
    row.label = sigmas[s] == 0.0 ? "cd_split" : ("scd_split sigma=" + fmt(sigmas[s], 3));
    std::vector<double> cov(config.trials), len(config.trials), num(config.trials);
    for (int t = 0; t < config.trials; ++t) {
      row.trials.push_back(per_trial[t][s]);
      cov[t] = per_trial[t][s].coverage;
      len[t] = per_trial[t][s].mean_length;
      num[t] = per_trial[t][s].mean_count;
    }
    row.coverage = summarize(cov);
    row.length = summarize(len);
    row.count = summarize(num);
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string SigmaAblationResult::to_csv() const {
  std::string s = "dataset,sigma,label,trials,cov_mean,cov_sd,len_mean,len_sd,num_mean,num_sd\n";
  for (const SigmaRow& row : rows) {
    s += dataset_label + ',' + fmt(row.sigma, 4) + ',' + row.label + ',' +
         std::to_string(trials) + ',' + fmt(row.coverage.mean) + ',' + fmt(row.coverage.sd) +
         ',' + fmt(row.length.mean) + ',' + fmt(row.length.sd) + ',' + fmt(row.count.mean) +
         ',' + fmt(row.count.sd) + '\n';
  }
  return s;
}

std::string SigmaAblationResult::to_table() const {
  std::ostringstream out;
  out << "dataset: " << dataset_label << "   trials: " << trials << "\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-24s %-20s %-20s %-20s\n", "method / sigma", "coverage (%)",
                "length", "intervals");
  out << buf;
  for (const SigmaRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-24s %-20s %-20s %-20s\n", row.label.c_str(),
                  stat_cell(row.coverage, 100.0, 2).c_str(), stat_cell(row.length, 1.0, 2).c_str(),
                  stat_cell(row.count, 1.0, 2).c_str());
    out << buf;
  }
  return out.str();
}

const char* loss_kind_name(ValidationLossKind kind) {
  switch (kind) {
    case ValidationLossKind::global_l1:
      return "global_l1";
    case ValidationLossKind::global_l2:
      return "global_l2";
    case ValidationLossKind::mae:
      return "mae";
    case ValidationLossKind::mse:
      return "mse";
  }
  return "unknown";
}

LossAblationResult ablate_loss(const ExperimentConfig& config, const std::vector<double>& sigmas) {
  if (sigmas.empty()) throw InvalidInput("ablate_loss: empty sigma list");
  if (config.trials < 1) throw InvalidInput("ablate_loss: trials must be >= 1");

  Dataset csv_pool;
  if (config.dataset.kind == DatasetKind::csv) csv_pool = load_csv_pool(config);

  constexpr std::array<ValidationLossKind, 4> kinds{
      ValidationLossKind::global_l1, ValidationLossKind::global_l2, ValidationLossKind::mae,
      ValidationLossKind::mse};

  std::vector<std::array<std::vector<double>, 4>> trial_losses(config.trials);
  std::vector<std::array<double, 4>> trial_chosen(config.trials);
  parallel_for(config.trials, resolve_threads(config.threads), [&](int t) {
    const std::uint64_t seed_t = config.seed + static_cast<std::uint64_t>(t);
    const TrialData data = make_trial_data(config, &csv_pool, seed_t);

    ScdConfig scd_cfg = config.scd;
    scd_cfg.alpha = config.alpha;
    scd_cfg.seed = seed_t;
    scd_cfg.sigma_grid = sigmas;

    ScdValidationTrace trace;
    fit_scd(data.cp, scd_cfg, &trace);

    for (std::size_t k = 0; k < kinds.size(); ++k) {
      trial_losses[t][k].resize(sigmas.size());
      double best = std::numeric_limits<double>::infinity();
      double best_sigma = sigmas.front();
      for (std::size_t s = 0; s < sigmas.size(); ++s) {
        const double loss = validation_loss(trace.counts[s], scd_cfg.k_target, kinds[k]);
        trial_losses[t][k][s] = loss;
        if (loss < best) {
          best = loss;
          best_sigma = sigmas[s];
        }
      }
      trial_chosen[t][k] = best_sigma;
    }
  });

  LossAblationResult result;
  result.dataset_label = config.dataset.label();
  result.trials = config.trials;
  result.sigmas = sigmas;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    result.losses[k].resize(sigmas.size());
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
      std::vector<double> vals(config.trials);
      for (int t = 0; t < config.trials; ++t) vals[t] = trial_losses[t][k][s];
      result.losses[k][s] = summarize(vals);
    }
    result.chosen_sigma[k].resize(config.trials);
    for (int t = 0; t < config.trials; ++t) result.chosen_sigma[k][t] = trial_chosen[t][k];
  }
  return result;
}

std::string LossAblationResult::to_csv() const {
  std::string s =
      "dataset,sigma,global_l1_mean,global_l1_sd,global_l2_mean,global_l2_sd,mae_mean,mae_sd,"
      "mse_mean,mse_sd\n";
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    s += dataset_label + ',' + fmt(sigmas[i], 4);
    for (std::size_t k = 0; k < 4; ++k) {
      s += ',' + fmt(losses[k][i].mean) + ',' + fmt(losses[k][i].sd);
    }
    s += '\n';
  }
  constexpr std::array<const char*, 4> names{"global_l1", "global_l2", "mae", "mse"};
  for (std::size_t k = 0; k < 4; ++k) {
    s += "# sigma_hat " + std::string(names[k]) + " per trial:";
    for (double v : chosen_sigma[k]) s += ' ' + fmt(v, 4);
    s += '\n';
  }
  return s;
}

std::string LossAblationResult::to_table() const {
  std::ostringstream out;
  out << "dataset: " << dataset_label << "   trials: " << trials << "\n";
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%-10s %-18s %-18s %-18s %-18s\n", "sigma", "global_l1",
                "global_l2", "mae", "mse");
  out << buf;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-10s %-18s %-18s %-18s %-18s\n", fmt(sigmas[i], 3).c_str(),
                  stat_cell(losses[0][i], 1.0, 3).c_str(), stat_cell(losses[1][i], 1.0, 3).c_str(),
                  stat_cell(losses[2][i], 1.0, 3).c_str(), stat_cell(losses[3][i], 1.0, 3).c_str());
    out << buf;
  }
  constexpr std::array<const char*, 4> names{"global_l1", "global_l2", "mae", "mse"};
  for (std::size_t k = 0; k < 4; ++k) {
    out << "sigma_hat (" << names[k] << "):";
    for (double v : chosen_sigma[k]) out << ' ' << fmt(v, 3);
    out << "\n";
  }
  return out.str();
}

}  // namespace scd
