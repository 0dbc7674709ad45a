#pragma once

#include <array>
#include <optional>
#include <string>

#include "scd/common.hpp"

namespace scd {

struct Dataset {
  Matrix x;
  std::vector<double> y;
  std::vector<double> feature_means;  // filled by standardize
  std::vector<double> feature_sds;
  std::vector<std::string> warnings;

  int n() const { return x.rows; }
  int dim() const { return x.cols; }
};

// Three equal-weight Gaussian components at 0/1/2 + 0.1*X1, sd 0.2;
// X ~ Unif(-5,5)^5. Returned covariates are standardized.
Dataset gen_simple(int n, std::uint64_t seed);

// Softmax-weighted 7-component Gaussian mixture; component means
// mu_base + X'gamma_k, X ~ N(0,1)^5. Returned covariates are standardized.
Dataset gen_complex(int n, std::uint64_t seed);

struct ComplexMixtureParams {
  static constexpr int components = 7;
  static constexpr int dim = 5;
  std::array<double, components> mu_base{-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0};
  std::array<double, components> sigmas{1.0, 1.2, 1.5, 1.0, 1.5, 1.2, 1.0};
  Matrix beta;   // components x dim, entries N(0,1)
  Matrix gamma;  // components x dim, entries N(0,0.5^2)

  static ComplexMixtureParams draw(Rng& rng);
};

// Conditional draws from the simple mixture at a fixed (standardized) X1.
std::vector<double> simple_conditional_sample(double x1, int n, std::uint64_t seed);

// Softmax weights exp(x'beta_k) / sum_j exp(x'beta_j).
std::array<double, ComplexMixtureParams::components> mixture_weights(
    const ComplexMixtureParams& params, std::span<const double> x);

// Column-wise centering/scaling with population sd (denominator n).
// Constant columns are dropped with a warning.
Dataset standardize(const Dataset& dataset);

// Seeded permutation, contiguous blocks; rounding remainder goes to training.
std::array<Dataset, 3> three_way_split(const Dataset& dataset,
                                       const std::array<double, 3>& fractions,
                                       std::uint64_t seed);

// Header required; non-numeric columns dropped with a warning; rows with
// missing or non-finite cells dropped.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 std::optional<int> max_rows, std::uint64_t seed);

Dataset dataset_slice(const Dataset& src, int offset, int count);
Dataset dataset_concat(const Dataset& a, const Dataset& b);

}  // namespace scd
