#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ceo/optimize.hpp"
#include "ceo/parallel.hpp"
#include "ceo/quadrature.hpp"
#include "ceo/rng.hpp"
#include "ceo/stats.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ceo::numerics;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("rng streams replay bit-identically") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(a() == b());
    REQUIRE(a.normal() == b.normal());
  }
  RngStream c(42, 8);
  RngStream d(42, 7);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += c() == d();
  CHECK(same == 0);
}

TEST_CASE("distinct streams are uncorrelated") {
  const int n = 100000;
  for (std::uint64_t id = 1; id < 4; ++id) {
    RngStream a(5, mix_stream_id({1, id})), b(5, mix_stream_id({1, id + 1}));
    double sab = 0, sa = 0, sb = 0, saa = 0, sbb = 0;
    for (int i = 0; i < n; ++i) {
      const double x = a.uniform(), y = b.uniform();
      sab += x * y;
      sa += x;
      sb += y;
      saa += x * x;
      sbb += y * y;
    }
    const double cov = sab / n - sa / n * sb / n;
    const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
    CHECK(std::abs(corr) < 4.0 / std::sqrt(n));
  }
}

TEST_CASE("uniform and normal draws have the right moments") {
  RngStream rng(11, 0);
  const int n = 200000;
  double s = 0, s2 = 0, lo = 1, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("mix_stream_id separates tuples") {
  CHECK(mix_stream_id({1, 2, 3}) != mix_stream_id({1, 3, 2}));
  CHECK(mix_stream_id({1, 2}) != mix_stream_id({1, 2, 0}));
  CHECK(mix_stream_id({4, 5}) == mix_stream_id({4, 5}));
}

TEST_CASE("quadrature calibration suite") {
  struct Case {
    std::function<double(double)> f;
    double a, b, truth;
  };
  const double pi = std::numbers::pi;
  const std::vector<Case> cases{
      {[](double) { return 1.0; }, 0, 1, 1.0},
      {[](double x) { return x * x * x - 2 * x; }, -1, 2, 0.75},
      {[](double x) { return std::pow(x, 9); }, 0, 1, 0.1},
      {[](double x) { return oracle::normal_pdf_series(x); }, -6, 6, std::erf(6 / std::sqrt(2.0))},
      {[](double s) { return s * std::exp(-s); }, 0, 60, 1.0 - 61.0 * std::exp(-60.0)},
      {[](double x) { return std::exp(x); }, 0, 3, std::exp(3.0) - 1},
      {[](double x) { return std::sin(x); }, 0, pi, 2.0},
      {[](double x) { return 1.0 / (1.0 + x * x); }, -10, 10, 2 * std::atan(10.0)},
  };
  for (const auto& c : cases) {
    const auto r = integrate(c.f, c.a, c.b, 1e-10);
    CHECK(r.converged);
    CHECK(r.residual_estimate >= 0.0);
    CHECK(std::abs(r.value - c.truth) <= std::max(r.residual_estimate, 1e-14 * std::abs(c.truth)) + 1e-15);
    CHECK(std::abs(r.value - c.truth) < 1e-10 * std::max(1.0, std::abs(c.truth)));
  }
}

TEST_CASE("gauss-legendre is exact to degree 2n-1 and doubling does not hurt") {
  for (std::size_t n : {2, 5, 16, 64}) {
    const auto rule = gauss_legendre(n);
    REQUIRE(rule.size() == n);
    double wsum = 0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    const int deg = static_cast<int>(2 * n - 1);
    const double v = integrate_fixed([deg](double x) { return std::pow(x, deg - 1); }, 0.0, 1.0, rule);
    CHECK(v == doctest::Approx(1.0 / deg).epsilon(1e-12));
  }
  const auto smooth = [](double x) { return std::exp(-x) * std::cos(3 * x); };
  double prev = 1e300;
  for (std::size_t n : {4, 8, 16}) {
    const auto r = integrate_gauss_legendre(smooth, 0.0, 2.0, n);
    CHECK(r.residual_estimate <= prev * (1 + 1e-12) + 1e-15);
    prev = r.residual_estimate;
  }
}

TEST_CASE("piecewise integration handles jumps at breakpoints") {
  const auto step = [](double x) { return x < 0.3 ? 1.0 : 5.0; };
  const double bp[] = {0.0, 0.3, 1.0};
  const auto r = integrate_piecewise(step, bp);
  CHECK(r.value == doctest::Approx(0.3 + 3.5).epsilon(1e-12));
}

TEST_CASE("quadrature flags non-convergence at the node cap") {
  const auto wild = [](double x) { return std::sin(1.0 / x); };
  const auto r = integrate(wild, 1e-6, 1.0, 1e-12, 200);
  CHECK_FALSE(r.converged);
}

TEST_CASE("minimize_1d finds minima no worse than a fine grid") {
  auto q = minimize_1d([](double x) { return (x - 0.3) * (x - 0.3); }, 0, 1);
  CHECK(q.x == doctest::Approx(0.3).epsilon(1e-6));
  auto a = minimize_1d([](double x) { return std::abs(x - 0.5); }, 0, 1);
  CHECK(a.x == doctest::Approx(0.5).epsilon(1e-6));

  RngStream rng(3, 3);
  for (int k = 0; k < 50; ++k) {
    const double c1 = rng.uniform(-1, 1), c2 = rng.uniform(0, 10), c3 = rng.uniform(-3, 3);
    const auto f = [&](double x) { return c1 * std::sin(c2 * x) + c3 * x * x; };
    double grid_min = 1e300;
    for (int i = 0; i <= 1023; ++i) grid_min = std::min(grid_min, f(-1.0 + 2.0 * i / 1023.0));
    const auto m = minimize_1d(f, -1, 1, 1e-10);
    CHECK(m.value <= grid_min + 1e-10);
  }
}

TEST_CASE("log-log slope fits") {
  std::vector<double> x{1, 10, 100, 1000, 1e4};
  std::vector<double> y1, y2;
  for (double v : x) {
    y1.push_back(7.0 / v);
    y2.push_back(1.0 / (v * v));
  }
  const auto f1 = fit_loglog_slope(x, y1);
  CHECK(f1.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f1.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-12));
  CHECK(fit_loglog_slope(x, y2).slope == doctest::Approx(-2.0).epsilon(1e-12));

  RngStream rng(9, 1);
  std::vector<double> xs, ys;
  for (int i = 0; i < 30; ++i) {
    const double v = std::pow(10.0, 0.1 * i);
    xs.push_back(v);
    ys.push_back(3.0 * std::pow(v, -1.5) * std::exp(0.05 * rng.normal()));
  }
  const auto fn = fit_loglog_slope(xs, ys);
  CHECK(std::abs(fn.slope + 1.5) < 3.0 * fn.slope_stderr);

  std::vector<double> flat{2, 2, 2, 2};
  CHECK_THROWS(fit_loglog_slope(flat, y1));
  std::vector<double> three{1, 2, 3};
  CHECK_THROWS(fit_loglog_slope(three, three));
  std::vector<double> neg{1, -2, 3, 4};
  CHECK_THROWS(fit_loglog_slope(x, neg));
}

TEST_CASE("polynomial fit recovers a quadratic") {
  std::vector<double> x{0, 1, 2, 3, 4, 5}, y;
  for (double v : x) y.push_back(1.5 - 2 * v + 0.25 * v * v);
  const auto p = fit_polynomial(x, y, 2);
  REQUIRE(p.coefficients.size() == 3);
  CHECK(p.coefficients[0] == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(p.coefficients[1] == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(p.coefficients[2] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(p.evaluate(10) == doctest::Approx(1.5 - 20 + 25).epsilon(1e-9));
}

TEST_CASE("batch means and compensated sums") {
  std::vector<double> c(160, 2.5);
  const auto e = batch_means(c);
  CHECK(e.mean == 2.5);
  CHECK(e.half_width == 0.0);

  std::vector<double> ramp;
  for (int i = 0; i < 1600; ++i) ramp.push_back(i);
  CHECK(batch_means(ramp).mean == doctest::Approx(799.5));
  CHECK(batch_means(ramp).half_width > 0.0);

  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}

TEST_CASE("standard normal cdf and KS statistic") {
  CHECK(standard_normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(standard_normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
  RngStream rng(2, 2);
  std::vector<double> z(20000), shifted(20000);
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = rng.normal();
    shifted[i] = z[i] + 0.2;
  }
  CHECK(ks_statistic_standard_normal(z) < 0.015);
  CHECK(ks_statistic_standard_normal(shifted) > 0.05);
}

TEST_CASE("parallel_for is scheduling independent and propagates errors") {
  std::vector<double> one(1000), four(1000);
  const auto body = [](std::vector<double>& out) {
    return [&out](std::size_t i) {
      RngStream rng(1, i);
      out[i] = rng.normal();
    };
  };
  parallel_for(one.size(), 1, body(one));
  parallel_for(four.size(), 4, body(four));
  CHECK(one == four);
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [](std::size_t i) {
                                 if (i == 57) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("CEO_THREADS environment fallback") {
  ::setenv("CEO_THREADS", "3", 1);
  CHECK(threads_from_environment() == 3);
  ::unsetenv("CEO_THREADS");
  CHECK(threads_from_environment() == 0);
}
