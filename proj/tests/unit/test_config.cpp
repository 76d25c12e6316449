#include <sstream>

#include "ceo/config.hpp"
#include "ceo/errors.hpp"
#include "doctest.h"

using ceo::ConfigError;
using ceo::config::parse;

namespace {

ceo::config::LoadedConfig from(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

const char* kBase = R"([experiment]
name = t
seed = 7
trials = 100

[models]
source = gaussian
observation = additive_gaussian
noise_var = 2

[testchannels]
channel = additive_gaussian
var = 5

[estimators]
rule = median
r = 2

[harness]
L_grid = 11, 101, 1001
)";

}  // namespace

TEST_CASE("parses a complete experiment") {
  const auto c = from(kBase);
  CHECK(c.experiment.name == "t");
  CHECK(c.experiment.seed == 7);
  CHECK(c.experiment.trials == 100);
  CHECK(c.experiment.L_grid == std::vector<std::size_t>{11, 101, 1001});
  CHECK(c.experiment.channel.noise_variance() == 5.0);
  CHECK(c.experiment.model.observation().fisher_information(0.0) == 0.5);
  CHECK(c.has_channel);
  CHECK_FALSE(c.thresholds.slope_min);
  CHECK(c.entries.at("models.noise_var") == "2");
  CHECK(c.hash.size() == 16);
}

TEST_CASE("hash is stable under key and section reordering") {
  const std::string reordered = R"([harness]
L_grid = 11, 101, 1001
[estimators]
r = 2
rule = median
[testchannels]
var = 5
channel = additive_gaussian
[models]
noise_var = 2
observation = additive_gaussian
source = gaussian
[experiment]
trials = 100
seed = 7
name = t
)";
  CHECK(from(kBase).hash == from(reordered).hash);
  std::string changed = kBase;
  changed.replace(changed.find("var = 5"), 7, "var = 6");
  CHECK(from(kBase).hash != from(changed).hash);
}

TEST_CASE("strict keys and values") {
  CHECK_THROWS_AS(from(std::string(kBase) + "[mystery]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(from(std::string(kBase) + "[bounds]\nfoo = 1\n"), ConfigError);
  CHECK_THROWS_AS(from("[models]\nsource = gaussian\n"), ConfigError);
  CHECK_THROWS_AS(from("[models]\nobservation = additive_gaussian\nnoise_var = abc\n"), ConfigError);
  CHECK_THROWS_AS(from("[models]\nobservation = cauchy\n"), ConfigError);
  CHECK_THROWS_AS(from("[models]\nobservation = additive_uniform\nwidth = 1\n[testchannels]\nchannel = warp\n"),
                  ConfigError);
  CHECK_THROWS_AS(from("[models]\nobservation = additive_gaussian\nnoise_var = 1\n[testchannels]\nvar = 3\n"),
                  ConfigError);
  CHECK_THROWS_AS(from(std::string(kBase) + "[quantizer]\npolicy = sometimes\n"), ConfigError);
  CHECK_THROWS_AS(from(std::string(kBase) + "[quantizer]\npolicy = fixed\n"), ConfigError);
  CHECK_THROWS_AS(from("this is not ini [\n"), ConfigError);
  CHECK_THROWS_AS(ceo::config::load("/nonexistent/file.ini"), ConfigError);
  CHECK_THROWS_AS(from("[models]\nobservation = additive_gaussian\nnoise_var = 1\n[harness]\nL_grid = 10.5\n"),
                  ConfigError);
}

TEST_CASE("optional sections") {
  const auto c = from("[models]\nobservation = additive_uniform\nwidth = 1\nsource = uniform\n");
  CHECK_FALSE(c.has_channel);
  const auto q = from(std::string(kBase) + "[quantizer]\npolicy = fixed\nstep = 0.01\n[acceptance]\nslope_min = -1.1\n"
                                           "[bounds]\nresidual_tolerance = 1e-9\n");
  CHECK(q.experiment.quantizer.mode == ceo::harness::QuantizerPolicy::Mode::fixed);
  CHECK(q.experiment.quantizer.step == 0.01);
  CHECK(*q.thresholds.slope_min == -1.1);
  CHECK(q.residual_tolerance == 1e-9);
  const auto s = from(std::string(kBase) + "[quantizer]\npolicy = off\n");
  CHECK(s.experiment.quantizer.mode == ceo::harness::QuantizerPolicy::Mode::disabled);
}

TEST_CASE("sweeps build one channel per value") {
  std::string t = kBase;
  t.replace(t.find("var = 5"), 7, "sweep = 1, 10, 100");
  const auto c = from(t);
  REQUIRE(c.experiment.channel_sweep.size() == 3);
  CHECK(c.experiment.channel_sweep[1].noise_variance() == 10.0);
  CHECK(c.experiment.channel.noise_variance() == 100.0);
}

TEST_CASE("shipped presets load") {
  for (const char* name : {"gaussian_r2", "uniform_r1", "uniform_r2", "equivalence", "slb_only", "logistic"}) {
    CAPTURE(name);
    CHECK_NOTHROW(ceo::config::load(std::string(CEO_CONFIG_DIR) + "/" + name + ".ini"));
  }
}
