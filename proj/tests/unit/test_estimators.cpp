#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ceo/errors.hpp"
#include "ceo/estimators.hpp"
#include "ceo/rng.hpp"
#include "ceo/verify.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ceo::estimators;
using ceo::models::JointModel;
using ceo::models::ObservationSpec;
using ceo::models::SourceSpec;
using ceo::numerics::RngStream;
using ceo::testchannels::InverseMap;
using ceo::testchannels::TestChannelSpec;

TEST_CASE("rule names round-trip") {
  for (Rule r : {Rule::median, Rule::midrange, Rule::mean, Rule::posterior_gaussian}) {
    CHECK(parse_rule(to_string(r)) == r);
  }
  CHECK(parse_rule("posterior") == Rule::posterior_gaussian);
  CHECK_THROWS(parse_rule("trimmed"));
}

TEST_CASE("order statistics and the median agree with a sorting oracle") {
  RngStream rng(3, 1);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t L = 2 * (1 + rng() % 50) + 1;
    std::vector<double> v(L);
    for (double& x : v) x = rng.normal();
    const OrderStats os(v);
    CHECK(std::is_sorted(os.sorted().begin(), os.sorted().end()));
    auto copy = v;
    std::sort(copy.begin(), copy.end());
    CHECK(os.median() == copy[L / 2]);
    CHECK(os.min() == copy.front());
    CHECK(os.max() == copy.back());
    EstimatorSpec spec;
    CHECK(estimate(spec, v) == copy[L / 2]);
  }
  const std::vector<double> even{1, 2, 3, 4};
  CHECK_THROWS_AS(OrderStats(even).median(), ceo::PreconditionError);
  CHECK_THROWS_AS(estimate(EstimatorSpec{}, even), ceo::PreconditionError);
  CHECK_THROWS_AS(estimate(EstimatorSpec{}, std::vector<double>{}), ceo::PreconditionError);
}

TEST_CASE("point estimates apply the inverse map") {
  const std::vector<double> u{1.0, 4.0, 2.0, 3.5, 0.5};
  EstimatorSpec spec;
  spec.inverse_map = InverseMap::affine(0.5, 0.0);
  spec.rule = Rule::midrange;
  CHECK(estimate(spec, u) == doctest::Approx(4.5));
  spec.rule = Rule::mean;
  CHECK(estimate(spec, u) == doctest::Approx(4.4));
  spec.rule = Rule::median;
  CHECK(estimate(spec, u) == doctest::Approx(4.0));
  spec.rule = Rule::posterior_gaussian;
  // Prior N(0,1), tau^2 = 1: mean = sum(u) / (1 + L).
  CHECK(estimate(spec, u) == doctest::Approx(11.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("conjugate gaussian posterior") {
  const GaussianPrior prior{0.5, 2.0, 3.0};
  const std::vector<double> u{1.0, 2.0, -1.0, 0.5};
  const auto p = posterior(prior, u);
  // Precision-weighted oracle.
  const double prec = 1.0 / 2.0 + 4.0 / 3.0;
  const double mean = (0.5 / 2.0 + (1.0 + 2.0 - 1.0 + 0.5) / 3.0) / prec;
  CHECK(p.variance == doctest::Approx(1.0 / prec).epsilon(1e-14));
  CHECK(p.mean == doctest::Approx(mean).epsilon(1e-14));
  CHECK(p.entropy == doctest::Approx(0.5 * std::log(2 * std::numbers::pi * std::numbers::e / prec)).epsilon(1e-14));
}

TEST_CASE("rule preconditions") {
  const JointModel g(SourceSpec::gaussian(0, 1), ObservationSpec::additive_gaussian(1));
  const JointModel u(SourceSpec::uniform(0, 1), ObservationSpec::additive_uniform(1));
  try {
    check_preconditions(Rule::median, g, TestChannelSpec::additive_gaussian(1), 100);
    FAIL("even L accepted");
  } catch (const ceo::PreconditionError& e) {
    CHECK(std::string(e.what()).find("odd") != std::string::npos);
  }
  CHECK_NOTHROW(check_preconditions(Rule::median, g, TestChannelSpec::additive_gaussian(1), 101));
  CHECK_THROWS_AS(check_preconditions(Rule::midrange, g, TestChannelSpec::identity(), 101), ceo::PreconditionError);
  CHECK_THROWS_AS(check_preconditions(Rule::midrange, u, TestChannelSpec::additive_gaussian(1), 101),
                  ceo::PreconditionError);
  CHECK_NOTHROW(check_preconditions(Rule::midrange, u, TestChannelSpec::identity(), 100));
  CHECK_NOTHROW(check_preconditions(Rule::midrange, u, TestChannelSpec::additive_uniform(1), 100));
  CHECK_THROWS_AS(check_preconditions(Rule::posterior_gaussian, u, TestChannelSpec::identity(), 10),
                  ceo::PreconditionError);
  CHECK_NOTHROW(check_preconditions(Rule::posterior_gaussian, g, TestChannelSpec::additive_gaussian(1), 10));
}

TEST_CASE("exact median density") {
  const auto F = [](double v) { return std::clamp(v, 0.0, 1.0); };
  const auto f = [](double v) { return v >= 0 && v <= 1 ? 1.0 : 0.0; };
  CHECK(median_density(3, F, f, 0.5) == doctest::Approx(1.5));
  for (std::size_t L : {3, 11, 101}) {
    CHECK(oracle::simpson([&](double v) { return median_density(L, F, f, v); }, 0, 1, 20000) ==
          doctest::Approx(1.0).epsilon(1e-8));
  }
  // Histogram cross-check at L = 3.
  RngStream rng(5, 5);
  const int n = 400000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
    const double m = std::max(std::min(a, b), std::min(std::max(a, b), c));
    inside += (m > 0.45 && m < 0.55);
  }
  const double p = oracle::simpson([&](double v) { return median_density(3, F, f, v); }, 0.45, 0.55, 200);
  CHECK(std::abs(inside / double(n) - p) < 5 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("median absolute moment bound") {
  CHECK(median_abs_moment_bound(101, 2, 1.0) == doctest::Approx(1.0 / 404).epsilon(1e-12));
  CHECK(median_abs_moment_bound(1001, 1, 1 / std::sqrt(2 * std::numbers::pi)) == doctest::Approx(0.03161).epsilon(1e-3));
  CHECK_THROWS_AS(median_abs_moment_bound(99, 2, 1.0), ceo::PreconditionError);
  CHECK_THROWS_AS(median_abs_moment_bound(102, 2, 1.0), ceo::PreconditionError);
  CHECK_THROWS_AS(median_abs_moment_bound(101, 0.5, 1.0), ceo::PreconditionError);

  // Monte-Carlo oracles, 5%.
  RngStream rng(21, 0);
  const auto mc = [&](std::size_t L, double r, bool gaussian, int trials) {
    double acc = 0;
    std::vector<double> v(L);
    for (int t = 0; t < trials; ++t) {
      for (double& x : v) x = gaussian ? rng.normal() : rng.uniform();
      std::nth_element(v.begin(), v.begin() + L / 2, v.end());
      acc += std::pow(std::abs(v[L / 2] - (gaussian ? 0.0 : 0.5)), r);
    }
    return acc / trials;
  };
  CHECK(mc(101, 2, false, 40000) == doctest::Approx(1.0 / 404).epsilon(0.05));
  CHECK(mc(1001, 1, true, 20000) == doctest::Approx(0.03161).epsilon(0.05));
}

TEST_CASE("gaussian absolute central moments") {
  CHECK(gaussian_abs_central_moment(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gaussian_abs_central_moment(1, 1) == doctest::Approx(std::sqrt(2 / std::numbers::pi)).epsilon(1e-14));
  CHECK(gaussian_abs_central_moment(2, 4) == doctest::Approx(12.0).epsilon(1e-13));
  CHECK(gaussian_abs_central_moment(2, 4) == doctest::Approx(3 * 2.0 * 2.0).epsilon(1e-13));

  RngStream rng(1, 99);
  const int n = 2000000;
  double acc = 0;
  for (int i = 0; i < n; ++i) acc += std::abs(rng.normal());
  CHECK(acc / n == doctest::Approx(gaussian_abs_central_moment(1, 1)).epsilon(0.005));
}

TEST_CASE("extreme gap laws") {
  CHECK(ExtremeGapLaws(2).xi_density(0.0) == 1.0);
  for (std::size_t L : {2, 10, 100}) {
    const ExtremeGapLaws g(L);
    const double Ld = static_cast<double>(L);
    CHECK(oracle::simpson([&](double s) { return g.xi_density(s); }, 0, Ld, 20000) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(oracle::simpson([&](double s) { return s * g.eta_density(s); }, 0, Ld, 20000) ==
          doctest::Approx(Ld / (Ld + 1)).epsilon(1e-9));
  }
  const ExtremeGapLaws g10(10);
  // Joint law integrates to one over the triangle s1 + s2 <= L.
  const double joint = oracle::simpson(
      [&](double s1) { return oracle::simpson([&](double s2) { return g10.joint_density(s1, s2); }, 0, 10 - s1, 400); },
      0, 10, 400);
  CHECK(joint == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(g10.joint_density(6, 5) == 0.0);
  CHECK_THROWS(g10.xi_density(-0.1));
  CHECK_THROWS(g10.xi_density(10.5));
  CHECK_THROWS(ExtremeGapLaws(1));
  // Marginals approach e^{-s}.
  CHECK(ExtremeGapLaws(100000).xi_density(1.5) == doctest::Approx(std::exp(-1.5)).epsilon(1e-4));
}

TEST_CASE("midrange exact law") {
  CHECK(midrange_scaled_mse(101) == doctest::Approx(101.0 * 101 / (2.0 * 102 * 103)).epsilon(1e-15));
  // Same quantity from the joint gap law: E[(xi - eta)^2] / 4 at unit width.
  const ExtremeGapLaws g(30);
  const double e = oracle::simpson(
      [&](double s1) {
        return oracle::simpson([&](double s2) { return (s1 - s2) * (s1 - s2) * g.joint_density(s1, s2); }, 0, 30 - s1,
                               600);
      },
      0, 30, 600);
  CHECK(e / 4.0 == doctest::Approx(midrange_scaled_mse(30)).epsilon(1e-5));
  CHECK(ceo::verify::midrange_scaled_mse_monte_carlo(101, 40000, 1) ==
        doctest::Approx(midrange_scaled_mse(101)).epsilon(0.05));
}

TEST_CASE("sample median normality at reduced size") {
  using ceo::verify::Parent;
  CHECK(ceo::verify::median_ks_statistic(Parent::uniform, 1001, 20000, 3) < 0.02);
  CHECK(ceo::verify::median_ks_statistic(Parent::gaussian, 1001, 20000, 3) < 0.02);
}

TEST_CASE("scalar c_r inequality") {
  CHECK(ceo::verify::cr_inequality_violations(10000, 17) == 0);
  RngStream rng(8, 8);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(0, 10), b = rng.uniform(0, 10);
    const int r = 1 + static_cast<int>(rng() % 6);
    CHECK(std::pow(a + b, r) <= std::pow(2.0, r) * (std::pow(a, r) + std::pow(b, r)));
  }
}
