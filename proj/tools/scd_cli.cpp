// Command-line front end: experiment runs, sigma/loss ablations, and the
// theorem property checks. Exit codes: 0 success, 1 check failure, 2 config
// or usage error.

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "scd/config_file.hpp"
#include "scd/theorem_checks.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_path;
  std::string dump_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
  auto* c = cmd->add_option("--config", opts.config_path, "experiment config file");
  if (needs_config) c->required();
  cmd->add_option("--trials", opts.trials, "override trial count");
  cmd->add_option("--seed", opts.seed, "override master seed");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = auto)");
  cmd->add_option("--out", opts.out_path, "write machine-readable CSV here");
  cmd->add_option("--dump", opts.dump_path, "write per-test-point details here (run only)");
}

scd::ExperimentConfig load_config(const CommonOpts& opts) {
  scd::ExperimentConfig config = scd::parse_config_file(opts.config_path);
  if (opts.trials) config.trials = *opts.trials;
  if (opts.seed) config.seed = *opts.seed;
  if (opts.threads) config.threads = *opts.threads;
  if (!opts.dump_path.empty()) config.dump_path = opts.dump_path;
  return config;
}

void write_out(const std::string& path, const std::string& csv) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw scd::InvalidInput("cannot open output path " + path);
  out << csv;
}

std::vector<double> parse_sigma_list(const std::string& text) {
  std::vector<double> sigmas;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) sigmas.push_back(std::stod(item));
  }
  return sigmas;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SCD-split: smoothed conditional-density split conformal prediction"};
  app.require_subcommand(1);

  CommonOpts run_opts, sigma_opts, loss_opts;
  std::string sigma_list;
  std::uint64_t check_seed = 1;
  int check_threads = 0;

  auto* run_cmd = app.add_subcommand("run", "multi-trial benchmark across methods");
  add_common(run_cmd, run_opts, true);

  auto* sigma_cmd = app.add_subcommand("ablate-sigma", "metrics per fixed smoothing level");
  add_common(sigma_cmd, sigma_opts, true);
  sigma_cmd->add_option("--sigmas", sigma_list, "comma-separated ascending sigma values")
      ->required();

  auto* loss_cmd = app.add_subcommand("ablate-loss", "validation losses per sigma, all four kinds");
  add_common(loss_cmd, loss_opts, true);

  auto* check_cmd = app.add_subcommand("theorem-checks", "property suites for the theory claims");
  check_cmd->add_option("--seed", check_seed, "suite seed");
  check_cmd->add_option("--threads", check_threads, "worker threads (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      const auto config = load_config(run_opts);
      const auto result = scd::run_experiment(config);
      std::cout << result.to_table();
      write_out(run_opts.out_path, result.to_csv());
      return 0;
    }
    if (sigma_cmd->parsed()) {
      const auto config = load_config(sigma_opts);
      const auto sigmas = parse_sigma_list(sigma_list);
      const auto result = scd::ablate_sigma(config, sigmas);
      std::cout << result.to_table();
      write_out(sigma_opts.out_path, result.to_csv());
      return 0;
    }
    if (loss_cmd->parsed()) {
      const auto config = load_config(loss_opts);
      const auto sigmas = config.scd.sigma_grid;
      if (sigmas.empty()) {
        throw scd::InvalidInput("ablate-loss: config must list an explicit sigma_grid");
      }
      const auto result = scd::ablate_loss(config, sigmas);
      std::cout << result.to_table();
      write_out(loss_opts.out_path, result.to_csv());
      return 0;
    }
    // theorem-checks
    const auto report = scd::theorem_checks(check_seed, check_threads);
    std::cout << report.to_text();
    return report.all_pass() ? 0 : 1;
  } catch (const scd::InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
