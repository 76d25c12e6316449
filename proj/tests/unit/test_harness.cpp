#include <cmath>
#include <numbers>

#include "ceo/errors.hpp"
#include "ceo/harness.hpp"
#include "doctest.h"

using namespace ceo::harness;
using ceo::estimators::Rule;
using ceo::models::JointModel;
using ceo::models::ObservationSpec;
using ceo::models::SourceSpec;
using ceo::testchannels::TestChannelSpec;

namespace {

ExperimentConfig gaussian_config(double channel_var, std::size_t trials) {
  ExperimentConfig c;
  c.channel = TestChannelSpec::additive_gaussian(channel_var);
  c.trials = trials;
  c.L_grid = {11, 31, 101, 301, 1001};
  return c;
}

ExperimentConfig uniform_config(double r, std::size_t trials) {
  ExperimentConfig c;
  c.model = JointModel(SourceSpec::uniform(0, 1), ObservationSpec::additive_uniform(1));
  c.channel = TestChannelSpec::identity();
  c.rule = Rule::midrange;
  c.r = r;
  c.trials = trials;
  c.L_grid = {11, 31, 101, 301, 1001};
  return c;
}

}  // namespace

TEST_CASE("noiseless observation through the identity channel has zero distortion") {
  ExperimentConfig c;
  c.model = JointModel(SourceSpec::gaussian(0, 1), ObservationSpec::additive_gaussian(0.0));
  c.channel = TestChannelSpec::identity();
  c.trials = 64;
  c.L_grid = {5};
  const auto p = run_distortion_point(c, 5);
  CHECK(p.distortion.mean == 0.0);
  CHECK(p.rate.r_sum() == 0.0);
}

TEST_CASE("gaussian median distortion matches the asymptotic variance") {
  auto c = gaussian_config(1.0, 10000);
  const auto p = run_distortion_point(c, 1001);
  CHECK(1001 * p.distortion.mean == doctest::Approx(std::numbers::pi).epsilon(0.05));
  CHECK(p.clamps == 0);
  CHECK(p.rate.i_yu_given_x == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("uniform midrange distortion matches the exact law") {
  auto c = uniform_config(2, 10000);
  const auto p = run_distortion_point(c, 1001);
  // Midpoint inverse (slope 1/2 map): 2 L^2 D -> 1.
  CHECK(2.0 * 1001.0 * 1001.0 * p.distortion.mean == doctest::Approx(1.0).epsilon(0.05));
  CHECK(1001.0 * 1001.0 * p.distortion.mean ==
        doctest::Approx(ceo::estimators::midrange_scaled_mse(1001)).epsilon(0.05));
}

TEST_CASE("runs are bit-identical across reruns and thread counts") {
  auto c = gaussian_config(1.0, 512);
  const auto a = simulate_absolute_errors(c, 101);
  const auto b = simulate_absolute_errors(c, 101);
  c.threads = 3;
  const auto t = simulate_absolute_errors(c, 101);
  CHECK(a == b);
  CHECK(a == t);
  c.seed += 1;
  CHECK(simulate_absolute_errors(c, 101) != a);
}

TEST_CASE("config validation") {
  auto c = gaussian_config(1.0, 100);
  c.L_grid = {100};
  CHECK_THROWS_AS(c.validate(), ceo::PreconditionError);
  c.L_grid = {};
  CHECK_THROWS_AS(c.validate(), ceo::ConfigError);
  c = gaussian_config(1.0, 10);
  CHECK_THROWS_AS(c.validate(), ceo::ConfigError);
  c = gaussian_config(1.0, 100);
  c.r = 1;
  CHECK_THROWS_AS(c.validate(), ceo::PreconditionError);
  c = gaussian_config(1.0, 100);
  c.quantizer.mode = QuantizerPolicy::Mode::fixed;
  CHECK_THROWS_AS(c.validate(), ceo::ConfigError);
  auto u = uniform_config(1, 100);
  CHECK_NOTHROW(u.validate());
  u.L_grid = {11, 31, 101};
  CHECK_THROWS_AS(run_scaling_study(u), ceo::PreconditionError);
}

TEST_CASE("distortion is non-increasing in L") {
  for (const auto& c : {gaussian_config(10.0, 2000), uniform_config(1, 2000), uniform_config(2, 2000)}) {
    double prev_lo = 1e300;
    for (std::size_t L : c.L_grid) {
      const auto p = run_distortion_point(c, L);
      CHECK(p.distortion.lo() <= prev_lo);
      prev_lo = p.distortion.lo();
    }
  }
}

TEST_CASE("scaling study slopes at reduced size") {
  const auto g = run_scaling_study(gaussian_config(100.0, 2000));
  CHECK(g.regular);
  CHECK(g.rows.size() == 5);
  CHECK(g.fit.slope == doctest::Approx(-1.0).epsilon(0.1));
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    CHECK(g.rows[i].r_sum == doctest::Approx(g.rows[i].L * g.per_agent_rate));
    if (i > 0) CHECK(g.rows[i].L > g.rows[i - 1].L);
  }
  const auto u1 = run_scaling_study(uniform_config(1, 2000));
  CHECK_FALSE(u1.regular);
  CHECK(u1.fit.slope == doctest::Approx(-1.0).epsilon(0.1));
  const auto u2 = run_scaling_study(uniform_config(2, 2000));
  CHECK(u2.fit.slope == doctest::Approx(-2.0).epsilon(0.075));
}

TEST_CASE("equivalence study") {
  ExperimentConfig c;
  c.rule = Rule::posterior_gaussian;
  c.trials = 400;
  c.L_grid = {10, 100, 1000, 10000};
  const auto rows = run_equivalence_study(c);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(std::abs(row.gap) < 1e-12);
    CHECK(row.epi_holds);
    // Conjugate oracle sigma_X^2 tau^2 / (tau^2 + L sigma_X^2) with tau^2 = 2.
    CHECK(row.d_q == doctest::Approx(2.0 / (2.0 + row.L)).epsilon(1e-13));
    CHECK(row.d_q_monte_carlo.mean == doctest::Approx(row.d_q).epsilon(0.25));
  }
  CHECK(rows[2].d_log - rows[3].d_log == doctest::Approx(0.5 * std::log(10.0)).epsilon(1e-3));

  c.rule = Rule::median;
  CHECK_THROWS_AS(run_equivalence_study(c), ceo::PreconditionError);
}

TEST_CASE("bound comparison for the gaussian sweep") {
  auto c = gaussian_config(1000.0, 100);
  for (double v : {1.0, 10.0, 100.0, 1000.0}) c.channel_sweep.push_back(TestChannelSpec::additive_gaussian(v));
  const auto b = run_bound_comparison(c);
  CHECK(b.regular);
  CHECK(*b.C1 == doctest::Approx(1.0));
  CHECK(*b.C2 == doctest::Approx(0.25));
  REQUIRE(b.rows.size() == 4);
  for (const auto& row : b.rows) {
    REQUIRE(row.converse);
    REQUIRE(row.achievability);
    CHECK(*row.converse <= *row.achievability);
  }
  REQUIRE(b.converse_limit);
  CHECK(b.converse_limit->intercept == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(b.achievability_limit->intercept == doctest::Approx(std::numbers::pi / 4).epsilon(1e-4));
}

TEST_CASE("non-regular brackets and finite-L CZZ") {
  auto c = uniform_config(1, 4000);
  const auto b = run_bound_comparison(c, true);
  CHECK_FALSE(b.regular);
  REQUIRE(b.rows.size() == 1);
  REQUIRE(b.simulation);
  const double beta = b.simulation->beta_hat;
  const double ci = b.simulation->beta_half_width;
  CHECK(*b.rows[0].converse <= beta + 3 * ci);
  CHECK(beta <= *b.rows[0].achievability + 3 * ci);
  CHECK(*b.rows[0].achievability == doctest::Approx(2 * 0.5 * b.rows[0].mi).epsilon(1e-12));

  for (double r : {1.0, 2.0}) {
    auto cr = uniform_config(r, 20000);
    for (std::size_t L : {11, 101}) {
      const auto czz = czz_finite_L(cr, L, r);
      const auto p = run_distortion_point(cr, L);
      CHECK(czz.value <= p.distortion.mean);
      const double Ld = static_cast<double>(L);
      const double exact = r == 1 ? 1.0 / (4 * (Ld + 2)) : 1.0 / (4 * (Ld + 2) * (Ld + 3));
      CHECK(czz.value == doctest::Approx(exact).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(czz_finite_L(gaussian_config(1, 100), 11, 1), ceo::PreconditionError);
}
