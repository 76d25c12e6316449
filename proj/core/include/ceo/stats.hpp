#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ceo::numerics {

/// Neumaier-compensated running sum. Feed values in a fixed order to get
/// scheduling-independent results.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_mean(std::span<const double> values);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  // natural-log units
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
};

/// Ordinary least squares of log(y) on log(x). Requires >= 4 strictly positive
/// points and at least two distinct abscissae.
LogLogFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct PolynomialFit {
  std::vector<double> coefficients;  // c0 + c1 x + c2 x^2 + ...
  std::vector<double> stderrs;
  double evaluate(double x) const;
};

/// Least-squares polynomial of the given degree (QR-based).
PolynomialFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);

struct BatchMeansEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% Student-t half-width over batch means
  double lo() const { return mean - half_width; }
  double hi() const { return mean + half_width; }
};

/// Splits `values` into `batches` contiguous batches (in order) and returns
/// the grand mean with a 95% confidence half-width from the batch means.
BatchMeansEstimate batch_means(std::span<const double> values, std::size_t batches = 16);

double standard_normal_cdf(double z);

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against N(0, 1).
/// `samples` is copied and sorted.
double ks_statistic_standard_normal(std::vector<double> samples);

}  // namespace ceo::numerics
