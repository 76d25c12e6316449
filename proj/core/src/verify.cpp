#include "ceo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ceo/bounds.hpp"
#include "ceo/errors.hpp"
#include "ceo/estimators.hpp"
#include "ceo/parallel.hpp"
#include "ceo/quadrature.hpp"
#include "ceo/rng.hpp"
#include "ceo/stats.hpp"

namespace ceo::verify {

namespace {

constexpr std::uint64_t kMedianTag = 0x71;
constexpr std::uint64_t kMidrangeTag = 0x72;
constexpr std::uint64_t kInequalityTag = 0x73;

// Median and density at the median of the parent.
struct ParentLaw {
  double med;
  double f_med;
};

ParentLaw law(Parent p) {
  if (p == Parent::uniform) return {0.5, 1.0};
  return {0.0, 1.0 / std::sqrt(2.0 * std::numbers::pi)};
}

// Centered sample medians (median - med), one per trial.
std::vector<double> median_deviations(Parent parent, std::size_t L, std::size_t trials, std::uint64_t seed,
                                      std::size_t threads) {
  if (L % 2 == 0 || L == 0) throw PreconditionError("sample median checks need odd L = 2m+1");
  if (trials == 0) throw PreconditionError("need at least one trial");
  const ParentLaw pl = law(parent);
  std::vector<double> out(trials);
  numerics::parallel_for(trials, threads, [&](std::size_t t) {
    numerics::RngStream rng(seed, numerics::mix_stream_id({kMedianTag, static_cast<std::uint64_t>(parent), L, t}));
    std::vector<double> v(L);
    for (double& x : v) x = parent == Parent::uniform ? rng.uniform() : rng.normal();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(L / 2);
    std::nth_element(v.begin(), mid, v.end());
    out[t] = *mid - pl.med;
  });
  return out;
}

Check make(std::string name, double value, double target, double tol, std::string detail = {}) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.target = target;
  c.tolerance = tol;
  c.passed = std::abs(value - target) <= tol;
  c.detail = std::move(detail);
  return c;
}

Check below(std::string name, double value, double limit, std::string detail = {}) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.target = limit;
  c.passed = value < limit;
  c.detail = std::move(detail);
  return c;
}

}  // namespace

double median_ks_statistic(Parent parent, std::size_t L, std::size_t trials, std::uint64_t seed,
                           std::size_t threads) {
  auto dev = median_deviations(parent, L, trials, seed, threads);
  const double scale = 2.0 * law(parent).f_med * std::sqrt(static_cast<double>(L));
  for (double& d : dev) d *= scale;
  return numerics::ks_statistic_standard_normal(std::move(dev));
}

double median_normalized_mse(Parent parent, std::size_t L, std::size_t trials, std::uint64_t seed,
                             std::size_t threads) {
  const auto dev = median_deviations(parent, L, trials, seed, threads);
  numerics::CompensatedSum s;
  for (double d : dev) s.add(d * d);
  const double f = law(parent).f_med;
  return 4.0 * f * f * static_cast<double>(L) * s.value() / static_cast<double>(trials);
}

double midrange_scaled_mse_monte_carlo(std::size_t L, std::size_t trials, std::uint64_t seed,
                                       std::size_t threads) {
  if (L < 2 || trials == 0) throw PreconditionError("midrange check needs L >= 2 and trials > 0");
  std::vector<double> sq(trials);
  numerics::parallel_for(trials, threads, [&](std::size_t t) {
    numerics::RngStream rng(seed, numerics::mix_stream_id({kMidrangeTag, L, t}));
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      const double u = rng.uniform();
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    const double e = 0.5 * (lo + hi) - 0.5;
    sq[t] = e * e;
  });
  const double Ld = static_cast<double>(L);
  return Ld * Ld * numerics::compensated_mean(sq);
}

std::size_t cr_inequality_violations(std::size_t draws, std::uint64_t seed) {
  numerics::RngStream rng(seed, numerics::mix_stream_id({kInequalityTag}));
  std::size_t bad = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    // Mix scales so both the balanced and the lopsided regimes get sampled.
    const double a = std::exp(rng.uniform(-5.0, 5.0)) * (rng.uniform() < 0.05 ? 0.0 : 1.0);
    const double b = std::exp(rng.uniform(-5.0, 5.0));
    const int r = 1 + static_cast<int>(rng() % 6);
    const double lhs = std::pow(a + b, r);
    const double rhs = std::pow(2.0, r) * (std::pow(a, r) + std::pow(b, r));
    if (lhs > rhs) ++bad;
  }
  return bad;
}

double czz_no_observation(double r) {
  const auto report = bounds::czz_lower_bound_shift_invariant([](double) { return 1.0; },
                                                              [](double) { return 0.5; }, r);
  return report.value;
}

std::vector<Check> run_lemma_suite(const SuiteOptions& o) {
  const std::size_t red = std::max<std::size_t>(1, o.reduction);
  const std::size_t ks_trials = std::max<std::size_t>(2000, 100000 / red);
  const std::size_t mse_trials = std::max<std::size_t>(2000, 100000 / red);
  std::vector<Check> out;

  for (Parent p : {Parent::uniform, Parent::gaussian}) {
    const std::string tag = p == Parent::uniform ? "uniform" : "gaussian";
    out.push_back(below("median asymptotic normality KS (" + tag + ", L=1001)",
                        median_ks_statistic(p, 1001, ks_trials, o.seed, o.threads), 0.02));
  }
  // The batch half-width of a 1e5-trial mean is ~1%, so 3% is comfortable.
  out.push_back(make("median L*MSE*4f^2 (uniform, L=2001)",
                     median_normalized_mse(Parent::uniform, 2001, mse_trials, o.seed, o.threads), 1.0, 0.03));

  const double mr = midrange_scaled_mse_monte_carlo(101, mse_trials, o.seed, o.threads);
  const double mr_exact = estimators::midrange_scaled_mse(101);
  out.push_back(make("midrange L^2*MSE (uniform, L=101)", mr / mr_exact, 1.0, 0.05, "ratio to exact law"));

  for (double r : {1.0, 2.0, 3.0, 4.0, 2.5}) {
    // Direct quadrature of |z|^r phi(z).
    const auto q = numerics::integrate(
        [r](double z) { return std::pow(std::abs(z), r) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); },
        0.0, 40.0, 1e-12);
    out.push_back(make("gaussian |Z|^r moment r=" + std::to_string(r).substr(0, 3),
                       estimators::gaussian_abs_central_moment(1.0, r), 2.0 * q.value, 1e-9));
  }

  const estimators::ExtremeGapLaws gaps(100);
  const auto norm = numerics::integrate([&](double s) { return gaps.xi_density(s); }, 0.0, 100.0, 1e-12);
  const auto mean = numerics::integrate([&](double s) { return s * gaps.xi_density(s); }, 0.0, 100.0, 1e-12);
  out.push_back(make("extreme gap density normalization (L=100)", norm.value, 1.0, 1e-9));
  out.push_back(make("extreme gap mean (L=100)", mean.value, 100.0 / 101.0, 1e-9));

  out.push_back(make("CZZ without observations r=1", czz_no_observation(1.0), 1.0 / 8.0, 1e-6));
  out.push_back(make("CZZ without observations r=2", czz_no_observation(2.0), 1.0 / 24.0, 1e-6));

  const double pts[] = {-60.0, 60.0};
  const auto phi = [](double mu) {
    return [mu](double x) { return std::exp(-0.5 * (x - mu) * (x - mu)) / std::sqrt(2.0 * std::numbers::pi); };
  };
  out.push_back(make("Chernoff information N(0,1) vs N(1,1)",
                     bounds::chernoff_information(phi(0.0), phi(1.0), pts).value, 0.125, 1e-6));

  out.push_back(make("c_r inequality violations over 1e4 draws",
                     static_cast<double>(cr_inequality_violations(10000, o.seed)), 0.0, 0.0));
  return out;
}

}  // namespace ceo::verify
