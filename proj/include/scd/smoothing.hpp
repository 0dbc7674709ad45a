#pragma once

#include <functional>
#include <span>
#include <vector>

#include "scd/grid.hpp"

namespace scd {

enum class SmoothPath { spectral, spatial };

struct SmoothParams {
  double sigma = 0.0;               // response units
  double kernel_truncation = 6.0;   // kernel / padding reach, in multiples of sigma
  SmoothPath path = SmoothPath::spectral;

  void validate() const;
};

// Discrete convolution with a Gaussian kernel sampled on the grid, truncated
// at +-truncation*sigma and renormalized to sum 1; output renormalized to
// unit integral. sigma = 0 returns the input unchanged.
GridDensity gaussian_convolve(const GridDensity& density, const SmoothParams& params);

// Spectral path: zero-pad, DFT, multiply by the Gaussian low-pass filter
// H(w) = exp(-2 pi^2 sigma^2 w^2) at physical frequencies, inverse DFT, crop,
// clamp tiny negatives, renormalize. sigma = 0 returns the input unchanged.
GridDensity fourier_smooth(const GridDensity& density, const SmoothParams& params);

// Dispatch on params.path.
GridDensity smooth_density(const GridDensity& density, const SmoothParams& params);

// Raw spectral filter on arbitrary grid values: no clamp, no renormalization.
std::vector<double> fourier_filter_values(std::span<const double> values, double step,
                                          double sigma, double truncation);

// Monte-Carlo smoothing of a callable: mean of f(y + delta_i) with
// delta_i ~ N(0, sigma^2), fresh draws per grid point, deterministic per seed.
std::vector<double> randomized_smooth(const std::function<double(double)>& f, double sigma,
                                      int n_samples, std::uint64_t seed, const YGrid& grid);

// Number of adjacent sign flips after dropping zero entries.
int sign_variations(std::span<const double> values);

}  // namespace scd
