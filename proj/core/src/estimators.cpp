#include "ceo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ceo/errors.hpp"
#include "ceo/stats.hpp"

namespace ceo::estimators {

std::string to_string(Rule rule) {
  switch (rule) {
    case Rule::median: return "median";
    case Rule::midrange: return "midrange";
    case Rule::mean: return "mean";
    case Rule::posterior_gaussian: return "posterior_gaussian";
  }
  return "unknown";
}

Rule parse_rule(const std::string& text) {
  if (text == "median") return Rule::median;
  if (text == "midrange") return Rule::midrange;
  if (text == "mean") return Rule::mean;
  if (text == "posterior_gaussian" || text == "posterior") return Rule::posterior_gaussian;
  throw ConfigError("unknown estimator rule '" + text + "'");
}

OrderStats::OrderStats(std::span<const double> values) : sorted_(values.begin(), values.end()) {
  if (sorted_.empty()) throw PreconditionError("order statistics of an empty vector");
  std::sort(sorted_.begin(), sorted_.end());
}

double OrderStats::median() const {
  if (sorted_.size() % 2 == 0) {
    throw PreconditionError("median rule needs an odd number of agents L = 2m+1, got L = " +
                            std::to_string(sorted_.size()));
  }
  return sorted_[sorted_.size() / 2];
}

double estimate(const EstimatorSpec& spec, std::span<const double> decoded) {
  if (decoded.empty()) throw PreconditionError("estimate: no decoded codewords");
  switch (spec.rule) {
    case Rule::median: return spec.inverse_map(OrderStats(decoded).median());
    case Rule::midrange: {
      const auto [lo, hi] = std::minmax_element(decoded.begin(), decoded.end());
      return spec.inverse_map(0.5 * (*lo + *hi));
    }
    case Rule::mean: return spec.inverse_map(numerics::compensated_mean(decoded));
    case Rule::posterior_gaussian: return posterior(spec.prior, decoded).mean;
  }
  throw PreconditionError("estimate: unknown rule");
}

PosteriorSummary posterior(const GaussianPrior& prior, std::span<const double> decoded) {
  if (!(prior.var > 0.0) || !(prior.codeword_var > 0.0)) {
    throw PreconditionError("posterior_gaussian needs positive prior and codeword variances");
  }
  numerics::CompensatedSum sum;
  for (double u : decoded) sum.add(u);
  const double L = static_cast<double>(decoded.size());
  PosteriorSummary p;
  p.variance = 1.0 / (1.0 / prior.var + L / prior.codeword_var);
  p.mean = p.variance * (prior.mean / prior.var + sum.value() / prior.codeword_var);
  p.entropy = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * p.variance);
  return p;
}

void check_preconditions(Rule rule, const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                         std::size_t L) {
  if (L == 0) throw PreconditionError("L must be >= 1");
  switch (rule) {
    case Rule::median:
      if (L % 2 == 0) {
        throw PreconditionError("median rule needs odd L = 2m+1 (even L is rejected, no averaging of the two middle values); got L = " +
                                std::to_string(L));
      }
      break;
    case Rule::midrange: {
      const testchannels::ComposedKernel k(model, channel, model.source().mean());
      if (!k.support().bounded()) {
        throw PreconditionError("midrange rule needs a codeword distribution with bounded support");
      }
      break;
    }
    case Rule::mean: break;
    case Rule::posterior_gaussian: {
      const bool gaussian_obs = std::holds_alternative<models::AdditiveGaussianNoise>(model.observation().kind());
      const bool gaussian_channel = std::holds_alternative<testchannels::AdditiveGaussianKernel>(channel.kind()) ||
                                    channel.is_identity();
      if (!model.source().is_gaussian() || !gaussian_obs || !gaussian_channel) {
        throw PreconditionError("posterior_gaussian needs a Gaussian source, observation and test channel");
      }
      break;
    }
  }
}

double median_density(std::size_t L, const std::function<double(double)>& F, const std::function<double(double)>& f,
                      double v) {
  if (L % 2 == 0 || L == 0) throw PreconditionError("median_density needs odd L");
  const double fv = f(v);
  if (!(fv > 0.0)) return 0.0;
  const double Fv = F(v);
  if (!(Fv > 0.0) || !(Fv < 1.0)) return 0.0;
  const double m = static_cast<double>(L / 2);
  const double log_beta = 2.0 * std::lgamma(m + 1.0) - std::lgamma(2.0 * m + 2.0);
  return std::exp(m * (std::log(Fv) + std::log1p(-Fv)) - log_beta) * fv;
}

double median_abs_moment_bound(std::size_t L, double r, double f_at_med) {
  if (!(f_at_med > 0.0)) throw PreconditionError("median_abs_moment_bound needs f(med) > 0");
  if (L < 101 || L % 2 == 0) throw PreconditionError("median_abs_moment_bound is stated for odd L >= 101");
  if (!(r >= 1.0)) throw PreconditionError("median_abs_moment_bound needs r >= 1");
  const double base = 1.0 / (2.0 * static_cast<double>(L) * f_at_med * f_at_med);
  return std::pow(base, 0.5 * r) * std::tgamma(0.5 * (r + 1.0)) / std::sqrt(std::numbers::pi);
}

double gaussian_abs_central_moment(double var, double r) {
  if (!(var > 0.0)) throw PreconditionError("gaussian_abs_central_moment needs var > 0");
  if (!(r >= 1.0)) throw PreconditionError("gaussian_abs_central_moment needs r >= 1");
  return std::pow(2.0 * var, 0.5 * r) * std::tgamma(0.5 * (r + 1.0)) / std::sqrt(std::numbers::pi);
}

ExtremeGapLaws::ExtremeGapLaws(std::size_t L) : L_(L) {
  if (L < 2) throw PreconditionError("extreme gap laws need L >= 2");
}

double ExtremeGapLaws::xi_density(double s) const {
  const double L = static_cast<double>(L_);
  if (s < 0.0 || s > L) throw PreconditionError("extreme gap argument outside [0, L]");
  return std::pow(1.0 - s / L, L - 1.0);
}

double ExtremeGapLaws::joint_density(double s1, double s2) const {
  const double L = static_cast<double>(L_);
  if (s1 < 0.0 || s2 < 0.0 || s1 > L || s2 > L) throw PreconditionError("extreme gap argument outside [0, L]");
  if (s1 + s2 > L) return 0.0;
  return ((L - 1.0) / L) * std::pow(1.0 - (s1 + s2) / L, L - 2.0);
}

double midrange_scaled_mse(std::size_t L) {
  const double l = static_cast<double>(L);
  return l * l / (2.0 * (l + 1.0) * (l + 2.0));
}

}  // namespace ceo::estimators
