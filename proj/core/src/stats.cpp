#include "ceo/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace ceo::numerics {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value() / static_cast<double>(values.size());
}

LogLogFit fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog_slope: size mismatch");
  if (x.size() < 4) throw std::invalid_argument("fit_loglog_slope: need at least 4 points");
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("fit_loglog_slope: all points must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const auto [min_it, max_it] = std::minmax_element(lx.begin(), lx.end());
  if (*max_it - *min_it < 1e-12) throw std::invalid_argument("fit_loglog_slope: degenerate abscissae");
  const auto poly = fit_polynomial(lx, ly, 1);
  return {poly.coefficients[1], poly.coefficients[0], poly.stderrs[1], poly.stderrs[0]};
}

double PolynomialFit::evaluate(double x) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

PolynomialFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
  if (degree < 0) throw std::invalid_argument("fit_polynomial: negative degree");
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index p = degree + 1;
  if (x.size() != y.size() || n < p) throw std::invalid_argument("fit_polynomial: not enough points");

  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double power = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      design(i, j) = power;
      power *= x[static_cast<std::size_t>(i)];
    }
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const auto qr = design.colPivHouseholderQr();
  if (qr.rank() < p) throw std::invalid_argument("fit_polynomial: degenerate abscissae");
  const Eigen::VectorXd coef = qr.solve(rhs);

  PolynomialFit fit;
  fit.coefficients.assign(coef.data(), coef.data() + p);
  fit.stderrs.assign(static_cast<std::size_t>(p), 0.0);
  if (n > p) {
    const double sigma2 = (rhs - design * coef).squaredNorm() / static_cast<double>(n - p);
    const Eigen::MatrixXd cov = (design.transpose() * design).inverse() * sigma2;
    for (Eigen::Index j = 0; j < p; ++j) fit.stderrs[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov(j, j)));
  }
  return fit;
}

BatchMeansEstimate batch_means(std::span<const double> values, std::size_t batches) {
  if (batches < 2) throw std::invalid_argument("batch_means: need at least two batches");
  if (values.size() < batches) throw std::invalid_argument("batch_means: fewer values than batches");
  const std::size_t n = values.size();
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * n / batches;
    const std::size_t end = (b + 1) * n / batches;
    means[b] = compensated_mean(values.subspan(begin, end - begin));
  }
  BatchMeansEstimate est;
  est.mean = compensated_mean(values);
  const double bm = compensated_mean(means);
  CompensatedSum ss;
  for (double m : means) ss.add((m - bm) * (m - bm));
  const double sd = std::sqrt(ss.value() / static_cast<double>(batches - 1));
  const boost::math::students_t dist(static_cast<double>(batches - 1));
  const double t = boost::math::quantile(dist, 0.975);
  est.half_width = t * sd / std::sqrt(static_cast<double>(batches));
  return est;
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_statistic_standard_normal(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = standard_normal_cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace ceo::numerics
