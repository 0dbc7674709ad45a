#pragma once

#include <string>
#include <vector>

#include "scd/common.hpp"

namespace scd {

// Outcome of one property suite: `worst` is the suite's extremal measured
// statistic (meaning given in `detail`).
struct SuiteResult {
  std::string name;
  int total = 0;
  int passed = 0;
  double worst = 0.0;
  std::string detail;

  bool pass() const { return total > 0 && passed == total; }
};

// Smoothing properties
SuiteResult check_mass_and_nonnegativity(std::uint64_t seed);
SuiteResult check_path_equivalence(std::uint64_t seed);
SuiteResult check_variation_diminishing(std::uint64_t seed);
SuiteResult check_semigroup(std::uint64_t seed);
SuiteResult check_randomized_vs_fourier(std::uint64_t seed);

// Conformal properties
SuiteResult check_quantile_oracle(std::uint64_t seed);
SuiteResult check_superlevel_oracle(std::uint64_t seed);
SuiteResult check_superlevel_monotonicity(std::uint64_t seed);
SuiteResult check_baseline_coverage_mc(std::uint64_t seed, int threads = 0);

// SCD pipeline properties
SuiteResult check_scd_coverage_mc(std::uint64_t seed, int threads = 0);
SuiteResult check_sigma_zero_reduction(std::uint64_t seed);
SuiteResult check_count_monotone_on_average(std::uint64_t seed, int threads = 0);
SuiteResult check_fixed_threshold_count(std::uint64_t seed);   // non-increasing count
SuiteResult check_narrow_valley_merge();                       // strict merge lattice
SuiteResult check_interval_length_bound(std::uint64_t seed);

struct TheoremReport {
  std::vector<SuiteResult> suites;

  bool all_pass() const;
  std::string to_text() const;  // one line per suite
};

TheoremReport theorem_checks(std::uint64_t seed, int threads = 0);

}  // namespace scd
