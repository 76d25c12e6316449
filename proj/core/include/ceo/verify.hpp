#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ceo::verify {

struct Check {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

enum class Parent { uniform, gaussian };

/// KS distance between 2 f(med) sqrt(L) (median - med) and N(0, 1), one
/// sample median per trial.
double median_ks_statistic(Parent parent, std::size_t L, std::size_t trials, std::uint64_t seed,
                           std::size_t threads = 1);

/// 4 f(med)^2 L E[(median - med)^2]; tends to 1.
double median_normalized_mse(Parent parent, std::size_t L, std::size_t trials, std::uint64_t seed,
                             std::size_t threads = 1);

/// Monte-Carlo L^2 E[(midrange - 1/2)^2] for a unif[0,1] parent.
double midrange_scaled_mse_monte_carlo(std::size_t L, std::size_t trials, std::uint64_t seed,
                                       std::size_t threads = 1);

/// Number of random (a, b >= 0, r in 1..6) with (a+b)^r > 2^r (a^r + b^r).
std::size_t cr_inequality_violations(std::size_t draws, std::uint64_t seed);

/// CZZ bound for a unif[0,1] source with no observations (P_min = 1/2).
double czz_no_observation(double r);

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  std::size_t threads = 1;
  /// Trial counts are divided by this; 1 runs the full-size checks.
  std::size_t reduction = 1;
};

std::vector<Check> run_lemma_suite(const SuiteOptions& options);

}  // namespace ceo::verify
