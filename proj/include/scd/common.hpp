#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace scd {

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidState : std::logic_error {
  using std::logic_error::logic_error;
};

// splitmix64 step; derives independent stream seeds from one master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic RNG. Uniform/normal transforms are spelled out here instead
// of using <random> distributions, whose output sequences are
// implementation-defined; frozen test values depend on the exact stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // in [0, 1)
  double uniform01();
  double uniform(double lo, double hi);
  // in [0, n)
  std::size_t uniform_index(std::size_t n);
  // standard normal via Marsaglia polar method
  double normal();
  double normal(double mean, double sd);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Dense row-major matrix of doubles.
struct Matrix {
  std::vector<double> data;
  int rows = 0;
  int cols = 0;

  Matrix() = default;
  Matrix(int r, int c) : data(static_cast<std::size_t>(r) * c, 0.0), rows(r), cols(c) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::span<const double> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
  std::span<double> row(int r) {
    return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
};

double mean_of(std::span<const double> v);
// denominator n-1; returns 0 for n < 2
double sample_sd(std::span<const double> v);
// denominator n
double population_sd(std::span<const double> v);

double squared_distance(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> v);

// SCD_THREADS env var when `requested` is 0, else hardware concurrency.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n). Deterministic as long as fn(i) only writes
// slot i of its output. The first worker exception is rethrown here.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n && !failed.load(); i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace scd
