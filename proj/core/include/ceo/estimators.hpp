#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ceo/testchannels.hpp"

namespace ceo::estimators {

enum class Rule { median, midrange, mean, posterior_gaussian };

std::string to_string(Rule rule);
/// Parses "median", "midrange", "mean" or "posterior_gaussian".
Rule parse_rule(const std::string& text);

/// Prior and per-codeword noise for the conjugate Gaussian posterior.
struct GaussianPrior {
  double mean = 0.0;
  double var = 1.0;           // sigma_X^2
  double codeword_var = 1.0;  // tau^2 = Var(U | x)
};

struct EstimatorSpec {
  Rule rule = Rule::median;
  testchannels::InverseMap inverse_map = testchannels::InverseMap::identity();
  GaussianPrior prior;  // posterior_gaussian only
};

struct PosteriorSummary {
  double mean = 0.0;
  double variance = 0.0;
  double entropy = 0.0;  // nats
};

/// Sorted copy of the decoded codewords.
class OrderStats {
 public:
  explicit OrderStats(std::span<const double> values);

  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted() const noexcept { return sorted_; }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }
  /// U_(m+1) for L = 2m+1; throws PreconditionError for even L.
  double median() const;
  double midrange() const { return 0.5 * (min() + max()); }

 private:
  std::vector<double> sorted_;
};

/// Point estimate l^-1(statistic) for the median, midrange and mean rules;
/// the posterior mean for posterior_gaussian. Throws PreconditionError for
/// empty input and for even L with the median rule.
double estimate(const EstimatorSpec& spec, std::span<const double> decoded);

/// Exact Gaussian posterior of X given L codewords U_i = X + noise(tau^2).
PosteriorSummary posterior(const GaussianPrior& prior, std::span<const double> decoded);

/// Validates rule preconditions against a configuration.
void check_preconditions(Rule rule, const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                         std::size_t L);

/// Exact density of the sample median of L = 2m+1 i.i.d. draws:
/// F^m (1-F)^m f / B(m+1, m+1).
double median_density(std::size_t L, const std::function<double(double)>& F, const std::function<double(double)>& f,
                      double v);

/// (1 / (2 L f^2))^{r/2} Gamma((r+1)/2) / sqrt(pi); L >= 101.
double median_abs_moment_bound(std::size_t L, double r, double f_at_med);

/// E|Z - mu|^r for Z ~ N(mu, var).
double gaussian_abs_central_moment(double var, double r);

/// Finite-L laws of xi = L * (U_(1) - a) and eta = L * (b - U_(L)) for a
/// unif[a, b] parent rescaled to unit width.
class ExtremeGapLaws {
 public:
  explicit ExtremeGapLaws(std::size_t L);

  std::size_t L() const noexcept { return L_; }
  /// (1 - s/L)^{L-1}; same law for xi and eta.
  double xi_density(double s) const;
  double eta_density(double s) const { return xi_density(s); }
  /// ((L-1)/L) (1 - (s1+s2)/L)^{L-2} on s1 + s2 <= L.
  double joint_density(double s1, double s2) const;

 private:
  std::size_t L_;
};

/// L^2 * E[(midrange - midpoint)^2] / width^2 for a unif parent:
/// L^2 / (2 (L+1) (L+2)).
double midrange_scaled_mse(std::size_t L);

}  // namespace ceo::estimators
