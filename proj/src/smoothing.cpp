#include "scd/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace scd {

namespace {

constexpr double kNegativeClamp = -1e-9;

void clamp_negatives(std::vector<double>& values) {
  for (double& v : values) {
    if (v < 0.0) {
      if (v < kNegativeClamp) {
        throw InvalidState("smoothing: negative value beyond ringing tolerance");
      }
      v = 0.0;
    }
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT; inverse applies conjugation and 1/n scaling.
void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

}  // namespace

void SmoothParams::validate() const {
  if (sigma < 0.0 || !std::isfinite(sigma)) throw InvalidInput("SmoothParams: sigma must be >= 0");
  if (kernel_truncation < 3.0) throw InvalidInput("SmoothParams: kernel truncation must be >= 3");
}

GridDensity gaussian_convolve(const GridDensity& density, const SmoothParams& params) {
  params.validate();
  if (params.sigma == 0.0) return density;

  const double h = density.grid.step();
  const double sigma = params.sigma;
  const int radius = static_cast<int>(std::ceil(params.kernel_truncation * sigma / h));

  std::vector<double> kernel(2 * radius + 1);
  double ksum = 0.0;
  for (int m = -radius; m <= radius; ++m) {
    const double u = m * h / sigma;
    kernel[m + radius] = std::exp(-0.5 * u * u);
    ksum += kernel[m + radius];
  }
  for (double& k : kernel) k /= ksum;

  const int n = density.grid.n_points;
  std::vector<double> out(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const int m_lo = std::max(-radius, j - (n - 1));
    const int m_hi = std::min(radius, j);
    double s = 0.0;
    for (int m = m_lo; m <= m_hi; ++m) {
      s += kernel[m + radius] * density.values[j - m];
    }
    out[j] = s;
  }

  GridDensity result(density.grid, std::move(out));
  result.normalize();
  return result;
}

std::vector<double> fourier_filter_values(std::span<const double> values, double step,
                                          double sigma, double truncation) {
  if (sigma == 0.0) return {values.begin(), values.end()};
  const std::size_t n = values.size();
  const std::size_t pad = static_cast<std::size_t>(std::ceil(truncation * sigma / step));
  const std::size_t n_fft = next_pow2(n + 2 * pad);

  std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) buf[pad + j] = values[j];

  fft(buf, false);
  const double c = 2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma;
  for (std::size_t k = 0; k < n_fft; ++k) {
    const std::size_t kk = std::min(k, n_fft - k);
    const double w = static_cast<double>(kk) / (static_cast<double>(n_fft) * step);
    buf[k] *= std::exp(-c * w * w);
  }
  fft(buf, true);

  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = buf[pad + j].real();
  return out;
}

GridDensity fourier_smooth(const GridDensity& density, const SmoothParams& params) {
  params.validate();
  if (params.sigma == 0.0) return density;

  GridDensity result(density.grid,
                     fourier_filter_values(density.values, density.grid.step(), params.sigma,
                                           params.kernel_truncation));
  clamp_negatives(result.values);
  result.normalize();
  return result;
}

GridDensity smooth_density(const GridDensity& density, const SmoothParams& params) {
  return params.path == SmoothPath::spectral ? fourier_smooth(density, params)
                                             : gaussian_convolve(density, params);
}

std::vector<double> randomized_smooth(const std::function<double(double)>& f, double sigma,
                                      int n_samples, std::uint64_t seed, const YGrid& grid) {
  if (sigma <= 0.0 || !std::isfinite(sigma)) {
    throw InvalidInput("randomized_smooth: sigma must be > 0");
  }
  if (n_samples < 1) throw InvalidInput("randomized_smooth: need at least one sample");

  Rng rng(seed);
  std::vector<double> out(grid.n_points, 0.0);
  for (int j = 0; j < grid.n_points; ++j) {
    const double y = grid.point(j);
    double s = 0.0;
    for (int i = 0; i < n_samples; ++i) s += f(y + rng.normal(0.0, sigma));
    out[j] = s / n_samples;
  }
  return out;
}

int sign_variations(std::span<const double> values) {
  int flips = 0;
  int prev = 0;
  for (double v : values) {
    if (v == 0.0) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (prev != 0 && s != prev) ++flips;
    prev = s;
  }
  return flips;
}

}  // namespace scd
