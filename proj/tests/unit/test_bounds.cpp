#include <cmath>
#include <numbers>
#include <vector>

#include "ceo/bounds.hpp"
#include "ceo/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ceo::bounds;
using ceo::models::JointModel;
using ceo::models::ObservationSpec;
using ceo::models::SourceSpec;
using ceo::testchannels::TestChannelSpec;

namespace {

const double kPi = std::numbers::pi;
const double kE = std::numbers::e;
const double kGaussH = 0.5 * std::log(2 * kPi * kE);

std::function<double(double)> normal(double mu, double var = 1.0) {
  return [mu, var](double x) { return oracle::gaussian_pdf(x, mu, var); };
}

std::function<double(double)> box(double lo, double hi) {
  return [lo, hi](double x) { return x >= lo && x <= hi ? 1.0 / (hi - lo) : 0.0; };
}

}  // namespace

TEST_CASE("shannon lower bound") {
  CHECK(shannon_lower_bound(kGaussH, 2, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(shannon_lower_bound(kGaussH, 2, 0.25) == doctest::Approx(0.69315).epsilon(1e-5));
  for (double D = 1e-3; D <= 1.0; D *= 1.1) {
    CHECK(std::abs(shannon_lower_bound(kGaussH, 2, D) - 0.5 * std::log(1.0 / D)) < 1e-9);
  }
  for (double r : {1.0, 2.0, 3.0}) {
    for (double h : {-0.5, 0.3, 2.0}) {
      const double closed = std::exp(r * h) / (r * kE * std::pow(2 * std::tgamma(1 + 1 / r), r));
      CHECK(slb_zero_crossing(h, r) == doctest::Approx(closed).epsilon(1e-12));
      CHECK(std::abs(shannon_lower_bound(h, r, closed)) < 1e-10);
    }
  }
  CHECK(shannon_lower_bound(kGaussH, 2, 4.0) < 0.0);
}

TEST_CASE("clarke-barron asymptotic") {
  // X ~ N(0,1), Fisher information 1/tau^2 with tau^2 = 1.
  const double L = 1e4;
  const double cb = clarke_barron_mi(kGaussH, std::log(1.0), L);
  CHECK(std::abs(cb - 0.5 * std::log(1 + L)) < 0.01);
  CHECK(clarke_barron_mi(kGaussH, 0.0, L * kE * kE) - cb == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(clarke_barron_mi(kGaussH, 0.8, L) - cb == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_THROWS(clarke_barron_mi(kGaussH, 0.0, 1.0));
}

TEST_CASE("regular constants") {
  CHECK(thm2_converse_coefficient(2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(thm1_achievability_coefficient(2) == doctest::Approx(0.25).epsilon(1e-14));
  // Independent evaluation at r = 3.
  const double c1 = (1.0 / (3 * kE)) * std::pow(std::sqrt(kPi * kE) / (std::sqrt(2.0) * std::tgamma(4.0 / 3)), 3);
  const double c2 = std::pow(1 / std::sqrt(2.0), 3) * std::tgamma(2.0) / std::sqrt(kPi);
  CHECK(thm2_converse_coefficient(3) == doctest::Approx(c1).epsilon(1e-13));
  CHECK(thm1_achievability_coefficient(3) == doctest::Approx(c2).epsilon(1e-13));
  CHECK_THROWS_AS(thm2_converse_coefficient(1.5), ceo::PreconditionError);
  CHECK_THROWS_AS(thm1_achievability_coefficient(1), ceo::PreconditionError);
}

TEST_CASE("chernoff information") {
  const double bp[] = {-12.0, 12.0};
  const auto same = chernoff_information(normal(0), normal(0), bp);
  CHECK(same.value == doctest::Approx(0.0).epsilon(1e-12));
  const auto g = chernoff_information(normal(0), normal(1), bp);
  CHECK(g.value == doctest::Approx(0.125).epsilon(1e-8));
  CHECK(g.s_star == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(g.s_star >= 0.0);
  CHECK(g.s_star <= 1.0);
  const auto rev = chernoff_information(normal(1), normal(0), bp);
  CHECK(rev.value == doctest::Approx(g.value).epsilon(1e-10));
  const auto wide = chernoff_information(normal(0), normal(2, 1), bp);
  CHECK(wide.value == doctest::Approx(0.5).epsilon(1e-8));

  const double ub[] = {0.0, 0.5, 1.0, 1.5};
  const auto u = chernoff_information(box(0, 1), box(0.5, 1.5), ub);
  CHECK(u.value == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  // Brute-force oracle: grid over s and Simpson overlap.
  const auto f0 = normal(0, 1), f1 = normal(0.7, 2.0);
  double best = -1e300;
  for (int i = 0; i <= 1000; ++i) {
    const double s = i / 1000.0;
    const double ov = oracle::simpson([&](double x) { return std::pow(f0(x), s) * std::pow(f1(x), 1 - s); }, -14, 14,
                                      4000);
    best = std::max(best, -std::log(ov));
  }
  const double wbp[] = {-14.0, 14.0};
  CHECK(chernoff_information(f0, f1, wbp).value == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("g(x) for uniform location families") {
  const JointModel u(SourceSpec::uniform(0, 1), ObservationSpec::additive_uniform(1));
  for (double x : {0.1, 0.5, 0.9}) {
    CHECK(g_of_x(u, TestChannelSpec::identity(), x).value == doctest::Approx(1.0).epsilon(1e-6));
  }
  const JointModel w(SourceSpec::uniform(0, 1), ObservationSpec::additive_uniform(0.25));
  CHECK(g_of_x(w, TestChannelSpec::identity(), 0.3).value == doctest::Approx(4.0).epsilon(1e-6));
  const auto a = g_of_x(u, TestChannelSpec::additive_uniform(0.5), 0.2).value;
  const auto b = g_of_x(u, TestChannelSpec::additive_uniform(0.5), 0.7).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
  CHECK(g_of_x(u, TestChannelSpec::identity(), 1.0).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("CZZ bound") {
  const auto unit = [](double) { return 1.0; };
  const auto half = [](double, double) { return 0.5; };
  CHECK(czz_lower_bound_exact(unit, half, 1).value == doctest::Approx(0.125).epsilon(1e-9));
  CHECK(czz_lower_bound_exact(unit, half, 2).value == doctest::Approx(1.0 / 24).epsilon(1e-9));
  CHECK(czz_lower_bound_exact(unit, half, 1).value <= 0.25);
  CHECK(czz_lower_bound_exact(unit, half, 2).value <= 1.0 / 12);
  CHECK(czz_lower_bound_exact(unit, [](double, double) { return 0.0; }, 2).value == 0.0);

  // Shrinking P_min pointwise can only lower the bound.
  double prev = 1e300;
  for (double c : {1.0, 0.7, 0.3, 0.1}) {
    const auto p = [c](double x0, double x1) { return c * 0.5 * std::exp(-5 * (x1 - x0)); };
    const double v = czz_lower_bound_exact(unit, p, 2, 64).value;
    CHECK(v <= prev);
    prev = v;
  }

  // Shift-invariant and general forms agree.
  const auto ph = [](double h) { return 0.5 * std::pow(1 - h, 7); };
  const double si = czz_lower_bound_shift_invariant(unit, ph, 1, 128).value;
  const double ex = czz_lower_bound_exact(unit, [&](double x0, double x1) { return ph(x1 - x0); }, 1, 128).value;
  CHECK(si == doctest::Approx(ex).epsilon(1e-10));
  CHECK(si == doctest::Approx(1.0 / (4 * 9)).epsilon(1e-9));
}

TEST_CASE("P_min for additive uniform observations") {
  // Only samples in the overlap leave the test undecided: P_min = (1/2)(1 - h/w)^L.
  for (std::size_t L : {1, 2, 11, 101}) {
    for (double h : {0.0, 0.05, 0.3, 0.9, 1.2}) {
      const double truth = h >= 1 ? 0.0 : 0.5 * std::pow(1 - h, static_cast<double>(L));
      CHECK(p_min_additive_uniform(L, 1.0, 0.2, 0.2 + h) == doctest::Approx(truth).epsilon(1e-10));
    }
  }
  CHECK(p_min_additive_uniform(5, 2.0, 0.0, 0.5) == doctest::Approx(0.5 * std::pow(0.75, 5)).epsilon(1e-10));
}

TEST_CASE("thm4 converse value") {
  const ceo::models::Interval unit{0.0, 1.0};
  const auto f = [](double) { return 1.0; };
  const auto g1 = [](double) { return 1.0; };
  CHECK(thm4_converse_value(f, unit, g1, 1, 1.0).value == doctest::Approx((1 - std::exp(-1.0)) / 2).epsilon(1e-10));
  CHECK(thm4_converse_value(f, unit, g1, 1, 1.0).value == doctest::Approx(0.31606).epsilon(1e-4));
  CHECK(thm4_converse_value(f, unit, g1, 2, 1.0).value == doctest::Approx(0.5 * (1 - 2 * std::exp(-1.0))).epsilon(1e-10));
  for (double I : {1e-1, 1e-2, 1e-3}) {
    CHECK(thm4_converse_value(f, unit, g1, 2, I).value ==
          doctest::Approx(I * I * thm4_converse_value(f, unit, g1, 2, 1.0).value).epsilon(1e-10));
  }
  const JointModel u(SourceSpec::uniform(0, 1), ObservationSpec::additive_uniform(1));
  CHECK(thm4_converse_value(u, TestChannelSpec::identity(), 1, 2.0).value ==
        doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("thm3 achievability value") {
  CHECK(thm3_achievability_value(1, 1, 1, 0.1) == doctest::Approx(0.2));
  CHECK(thm3_achievability_value(0.5, 1, 2, 0.1) == doctest::Approx(0.01));
  for (double I : {0.01, 0.1, 1.0}) {
    CHECK(thm3_achievability_value(0.5, 2, 3, I) / std::pow(I, 3) ==
          doctest::Approx(thm3_achievability_value(0.5, 2, 3, 1.0)));
  }
  CHECK_THROWS(thm3_achievability_value(1, 0, 1, 0.1));
}

TEST_CASE("thm2 converse value") {
  const JointModel g(SourceSpec::gaussian(0, 1), ObservationSpec::additive_gaussian(1));
  const auto t = thm2_converse_value(g, TestChannelSpec::additive_gaussian(1000), 2);
  // I / E[I_U] = (1/2) log(1 + 1e-3) * 1001.
  CHECK(t.jensen == doctest::Approx(0.5 * std::log1p(1e-3) * 1001).epsilon(1e-12));
  CHECK(t.jensen == doctest::Approx(0.50025).epsilon(1e-5));
  CHECK(t.exp_log == doctest::Approx(t.jensen).epsilon(1e-12));
  const auto t3 = thm2_converse_value(g, TestChannelSpec::additive_gaussian(10), 3);
  CHECK(t3.jensen == doctest::Approx(thm2_converse_coefficient(3) * std::pow(0.5 * std::log(1.1) * 11, 1.5)).epsilon(1e-12));

  // Non-constant Fisher information: exp-log form dominates the Jensen form.
  const JointModel cl(SourceSpec::uniform(0, 1), ObservationSpec::clayton(2.0));
  const auto tc = thm2_converse_value(cl, TestChannelSpec::additive_gaussian(1.0), 2);
  CHECK(tc.exp_log >= tc.jensen);
  CHECK(tc.mean_fisher > 0.0);
}

TEST_CASE("gaussian sweep ordering") {
  const JointModel g(SourceSpec::gaussian(0, 1), ObservationSpec::additive_gaussian(1));
  double prev_lo = 1e300, prev_hi = 1e300;
  std::vector<double> mi, lo;
  for (double v : {1.0, 10.0, 100.0, 1000.0}) {
    const auto ch = TestChannelSpec::additive_gaussian(v);
    const auto t = thm2_converse_value(g, ch, 2);
    const auto cert = ceo::testchannels::regularity_certificate(ch, g);
    const double hi = thm1_achievability_value(*cert.regular, 2, t.mi);
    CHECK(t.jensen <= hi);
    CHECK(t.jensen < prev_lo);
    CHECK(hi < prev_hi);
    CHECK(t.jensen > 0.5);
    CHECK(hi > kPi / 4);
    prev_lo = t.jensen;
    prev_hi = hi;
    mi.push_back(t.mi);
    lo.push_back(t.jensen);
  }
  const auto ex = extrapolate_to_zero_rate(mi, lo);
  CHECK(ex.intercept == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("zero-rate extrapolation recovers an exact quadratic") {
  const std::vector<double> x{0.1, 0.2, 0.4, 0.8, 1.6};
  std::vector<double> y;
  for (double v : x) y.push_back(0.3 + 0.2 * v - 0.05 * v * v);
  const auto e = extrapolate_to_zero_rate(x, y);
  CHECK(e.intercept == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(e.ci_half_width < 1e-8);
  CHECK_THROWS(extrapolate_to_zero_rate(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}));
}

TEST_CASE("bound kinds have stable names") {
  CHECK(to_string(BoundKind::slb) == "slb");
  CHECK(to_string(BoundKind::czz_finite_L) == "czz_finite_L");
  CHECK(to_string(BoundKind::thm4_conv) == "thm4_conv");
}
