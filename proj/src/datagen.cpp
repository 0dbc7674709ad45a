#include "scd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace scd {

namespace {

double simple_draw_y(double x1, Rng& rng) {
  static constexpr std::array<double, 3> kMeans{0.0, 1.0, 2.0};
  const std::size_t comp = rng.uniform_index(3);
  return rng.normal(kMeans[comp] + 0.1 * x1, 0.2);
}

}  // namespace

std::vector<double> simple_conditional_sample(double x1, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("simple_conditional_sample: n must be positive");
  Rng rng(seed);
  std::vector<double> ys(n);
  for (double& y : ys) y = simple_draw_y(x1, rng);
  return ys;
}

Dataset gen_simple(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("gen_simple: n must be positive");
  constexpr int d = 5;
  Rng rng(seed);
  Dataset raw;
  raw.x = Matrix(n, d);
  raw.y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) raw.x.at(i, j) = rng.uniform(-5.0, 5.0);
  }
  // responses are drawn conditional on the standardized covariates
  Dataset out = n >= 2 ? standardize(raw) : raw;
  for (int i = 0; i < n; ++i) out.y[i] = simple_draw_y(out.x.at(i, 0), rng);
  return out;
}

ComplexMixtureParams ComplexMixtureParams::draw(Rng& rng) {
  ComplexMixtureParams p;
  p.beta = Matrix(components, dim);
  p.gamma = Matrix(components, dim);
  for (int k = 0; k < components; ++k) {
    for (int j = 0; j < dim; ++j) p.beta.at(k, j) = rng.normal();
  }
  for (int k = 0; k < components; ++k) {
    for (int j = 0; j < dim; ++j) p.gamma.at(k, j) = rng.normal(0.0, 0.5);
  }
  return p;
}

Dataset gen_complex(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("gen_complex: n must be positive");
  constexpr int d = ComplexMixtureParams::dim;
  constexpr int kcomp = ComplexMixtureParams::components;
  Rng rng(seed);
  const ComplexMixtureParams params = ComplexMixtureParams::draw(rng);

  Dataset raw;
  raw.x = Matrix(n, d);
  raw.y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) raw.x.at(i, j) = rng.normal();
  }
  Dataset out = n >= 2 ? standardize(raw) : raw;

  for (int i = 0; i < n; ++i) {
    const auto xi = out.x.row(i);
    const auto weights = mixture_weights(params, xi);

    const double u = rng.uniform01();
    int comp = kcomp - 1;
    double acc = 0.0;
    for (int k = 0; k < kcomp; ++k) {
      acc += weights[k];
      if (acc >= u) {
        comp = k;
        break;
      }
    }

    double shift = 0.0;
    for (int j = 0; j < d; ++j) shift += xi[j] * params.gamma.at(comp, j);
    out.y[i] = rng.normal(params.mu_base[comp] + shift, params.sigmas[comp]);
  }
  return out;
}

std::array<double, ComplexMixtureParams::components> mixture_weights(
    const ComplexMixtureParams& params, std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.beta.cols) {
    throw InvalidInput("mixture_weights: covariate dimension mismatch");
  }
  std::array<double, ComplexMixtureParams::components> weights{};
  double max_logit = -1e300;
  for (int k = 0; k < ComplexMixtureParams::components; ++k) {
    double s = 0.0;
    for (int j = 0; j < params.beta.cols; ++j) s += x[j] * params.beta.at(k, j);
    weights[k] = s;
    max_logit = std::max(max_logit, s);
  }
  double total = 0.0;
  for (double& w : weights) {
    w = std::exp(w - max_logit);
    total += w;
  }
  for (double& w : weights) w /= total;
  return weights;
}

Dataset standardize(const Dataset& dataset) {
  const int n = dataset.n();
  const int d = dataset.dim();
  if (n < 2) throw InvalidInput("standardize: need at least 2 rows");

  std::vector<double> means(d), sds(d);
  std::vector<int> keep;
  Dataset out;
  out.warnings = dataset.warnings;
  for (int j = 0; j < d; ++j) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = dataset.x.at(i, j);
    means[j] = mean_of(col);
    sds[j] = population_sd(col);
    if (sds[j] < 1e-12) {
      out.warnings.push_back("standardize: dropped constant column " + std::to_string(j));
    } else {
      keep.push_back(j);
    }
  }

  out.x = Matrix(n, static_cast<int>(keep.size()));
  out.y = dataset.y;
  out.feature_means.reserve(keep.size());
  out.feature_sds.reserve(keep.size());
  for (std::size_t jj = 0; jj < keep.size(); ++jj) {
    const int j = keep[jj];
    out.feature_means.push_back(means[j]);
    out.feature_sds.push_back(sds[j]);
    for (int i = 0; i < n; ++i) {
      out.x.at(i, static_cast<int>(jj)) = (dataset.x.at(i, j) - means[j]) / sds[j];
    }
  }
  return out;
}

Dataset dataset_slice(const Dataset& src, int offset, int count) {
  if (offset < 0 || count < 0 || offset + count > src.n()) {
    throw InvalidInput("dataset_slice: range out of bounds");
  }
  Dataset out;
  out.x = Matrix(count, src.dim());
  out.y.resize(count);
  out.feature_means = src.feature_means;
  out.feature_sds = src.feature_sds;
  for (int i = 0; i < count; ++i) {
    out.y[i] = src.y[offset + i];
    const auto row = src.x.row(offset + i);
    std::copy(row.begin(), row.end(), out.x.row(i).begin());
  }
  return out;
}

Dataset dataset_concat(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim()) throw InvalidInput("dataset_concat: dimension mismatch");
  Dataset out;
  out.x = Matrix(a.n() + b.n(), a.dim());
  out.y.resize(a.n() + b.n());
  out.feature_means = a.feature_means;
  out.feature_sds = a.feature_sds;
  for (int i = 0; i < a.n(); ++i) {
    out.y[i] = a.y[i];
    std::copy(a.x.row(i).begin(), a.x.row(i).end(), out.x.row(i).begin());
  }
  for (int i = 0; i < b.n(); ++i) {
    out.y[a.n() + i] = b.y[i];
    std::copy(b.x.row(i).begin(), b.x.row(i).end(), out.x.row(a.n() + i).begin());
  }
  return out;
}

std::array<Dataset, 3> three_way_split(const Dataset& dataset,
                                       const std::array<double, 3>& fractions,
                                       std::uint64_t seed) {
  const int n = dataset.n();
  for (double f : fractions) {
    if (!(f > 0.0)) throw InvalidInput("three_way_split: fractions must be positive");
  }
  if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9) {
    throw InvalidInput("three_way_split: fractions must sum to 1");
  }

  const int n_val = static_cast<int>(std::floor(fractions[1] * n));
  const int n_cal = static_cast<int>(std::floor(fractions[2] * n));
  const int n_tr = n - n_val - n_cal;
  if (n_tr < 1 || n_val < 1 || n_cal < 1) {
    throw InvalidInput("three_way_split: a split would be empty");
  }

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);

  auto take = [&](int offset, int count) {
    Dataset part;
    part.x = Matrix(count, dataset.dim());
    part.y.resize(count);
    part.feature_means = dataset.feature_means;
    part.feature_sds = dataset.feature_sds;
    for (int i = 0; i < count; ++i) {
      const int src = perm[offset + i];
      part.y[i] = dataset.y[src];
      const auto row = dataset.x.row(src);
      std::copy(row.begin(), row.end(), part.x.row(i).begin());
    }
    return part;
  };

  return {take(0, n_tr), take(n_tr, n_val), take(n_tr + n_val, n_cal)};
}

namespace {

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (...) {
    return false;
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  return pos == s.size();
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column,
                 std::optional<int> max_rows, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("load_csv: missing header row");
  const auto header = parse_csv_line(line);
  const int n_cols = static_cast<int>(header.size());

  int target = -1;
  for (int j = 0; j < n_cols; ++j) {
    if (trim(header[j]) == target_column) target = j;
  }
  if (target < 0) throw InvalidInput("load_csv: target column '" + target_column + "' not found");

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = parse_csv_line(line);
    fields.resize(n_cols);
    rows.push_back(std::move(fields));
  }

  // a column is numeric when every nonempty cell parses
  std::vector<bool> numeric(n_cols, true);
  for (const auto& row : rows) {
    for (int j = 0; j < n_cols; ++j) {
      double v;
      if (!trim(row[j]).empty() && !parse_double(trim(row[j]), v)) numeric[j] = false;
    }
  }
  if (!numeric[target]) throw InvalidInput("load_csv: target column is not numeric");

  Dataset out;
  std::vector<int> feature_cols;
  for (int j = 0; j < n_cols; ++j) {
    if (j == target) continue;
    if (numeric[j]) {
      feature_cols.push_back(j);
    } else {
      out.warnings.push_back("load_csv: dropped non-numeric column '" + trim(header[j]) + "'");
    }
  }
  if (feature_cols.empty()) throw InvalidInput("load_csv: no numeric feature columns");

  std::vector<std::vector<double>> data;
  std::vector<double> ys;
  for (const auto& row : rows) {
    std::vector<double> vals(feature_cols.size());
    double yv;
    bool ok = parse_double(trim(row[target]), yv) && std::isfinite(yv);
    for (std::size_t jj = 0; ok && jj < feature_cols.size(); ++jj) {
      ok = parse_double(trim(row[feature_cols[jj]]), vals[jj]) && std::isfinite(vals[jj]);
    }
    if (!ok) continue;
    data.push_back(std::move(vals));
    ys.push_back(yv);
  }
  if (data.empty()) throw InvalidInput("load_csv: no usable rows");

  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  if (max_rows && static_cast<int>(data.size()) > *max_rows) {
    if (*max_rows < 1) throw InvalidInput("load_csv: max_rows must be positive");
    Rng rng(seed);
    rng.shuffle(order);
    order.resize(*max_rows);
    std::sort(order.begin(), order.end());
  }

  out.x = Matrix(static_cast<int>(order.size()), static_cast<int>(feature_cols.size()));
  out.y.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.y[i] = ys[order[i]];
    std::copy(data[order[i]].begin(), data[order[i]].end(), out.x.row(static_cast<int>(i)).begin());
  }
  return out;
}

}  // namespace scd
