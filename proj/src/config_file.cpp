#include "scd/config_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace scd {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_num(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (...) {
    throw InvalidInput("config: bad numeric value for '" + key + "': " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_num(key, value);
  if (v != std::floor(v)) throw InvalidInput("config: '" + key + "' must be an integer");
  return static_cast<int>(v);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw InvalidInput(origin + ":" + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scd") {
        throw InvalidInput(origin + ": unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (section.empty()) {
      if (key == "dataset") {
        if (value == "simple") {
          config.dataset.kind = DatasetKind::simple;
        } else if (value == "complex") {
          config.dataset.kind = DatasetKind::complex_mixture;
        } else if (value == "csv") {
          config.dataset.kind = DatasetKind::csv;
        } else {
          throw InvalidInput(origin + ": dataset must be simple, complex, or csv");
        }
      } else if (key == "csv_path") {
        config.dataset.csv_path = value;
      } else if (key == "csv_target") {
        config.dataset.csv_target = value;
      } else if (key == "csv_max_rows") {
        config.dataset.csv_max_rows = parse_int(key, value);
      } else if (key == "methods") {
        config.methods = split_list(value);
      } else if (key == "alpha") {
        config.alpha = parse_num(key, value);
      } else if (key == "n_cp") {
        config.n_cp = parse_int(key, value);
      } else if (key == "n_test") {
        config.n_test = parse_int(key, value);
      } else if (key == "trials") {
        config.trials = parse_int(key, value);
      } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_num(key, value));
      } else if (key == "threads") {
        config.threads = parse_int(key, value);
      } else if (key == "dump") {
        config.dump_path = value;
      } else {
        throw InvalidInput(origin + ": unknown key '" + key + "'");
      }
      continue;
    }

    // [scd]
    if (key == "k_target") {
      config.scd.k_target = parse_num(key, value);
    } else if (key == "sigma_grid") {
      if (value == "auto") {
        config.scd.sigma_grid.clear();
      } else {
        config.scd.sigma_grid.clear();
        for (const std::string& item : split_list(value)) {
          config.scd.sigma_grid.push_back(parse_num(key, item));
        }
      }
    } else if (key == "loss") {
      if (value == "global_l1") {
        config.scd.loss = ValidationLossKind::global_l1;
      } else if (value == "global_l2") {
        config.scd.loss = ValidationLossKind::global_l2;
      } else if (value == "mae") {
        config.scd.loss = ValidationLossKind::mae;
      } else if (value == "mse") {
        config.scd.loss = ValidationLossKind::mse;
      } else {
        throw InvalidInput(origin + ": loss must be global_l1, global_l2, mae, or mse");
      }
    } else if (key == "fractions") {
      const auto parts = split_list(value);
      if (parts.size() != 3) throw InvalidInput(origin + ": fractions needs 3 values");
      for (int i = 0; i < 3; ++i) config.scd.split_fractions[i] = parse_num(key, parts[i]);
    } else if (key == "clusters") {
      config.scd.clusters = value == "auto" ? 0 : parse_int(key, value);
    } else if (key == "cde_neighbors") {
      config.scd.cde_neighbors = parse_int(key, value);
    } else if (key == "grid_points") {
      config.scd.grid_points = parse_int(key, value);
    } else if (key == "z_points") {
      config.scd.z_points = parse_int(key, value);
    } else if (key == "lloyd_iters") {
      config.scd.lloyd_iters = parse_int(key, value);
    } else if (key == "path") {
      if (value == "spectral") {
        config.scd.smoothing_path = SmoothPath::spectral;
      } else if (value == "spatial") {
        config.scd.smoothing_path = SmoothPath::spatial;
      } else {
        throw InvalidInput(origin + ": path must be spectral or spatial");
      }
    } else if (key == "kernel_truncation") {
      config.scd.kernel_truncation = parse_num(key, value);
    } else {
      throw InvalidInput(origin + ": unknown key '" + key + "' in [scd]");
    }
  }

  if (config.dataset.kind == DatasetKind::csv) {
    if (config.dataset.csv_path.empty() || config.dataset.csv_target.empty()) {
      throw InvalidInput(origin + ": csv dataset needs csv_path and csv_target");
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace scd
