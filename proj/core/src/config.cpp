#include "ceo/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "ceo/errors.hpp"

namespace ceo::config {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"experiment", {"name", "seed", "trials", "threads"}},
      {"models", {"source", "source_mean", "source_var", "source_lo", "source_hi", "observation", "noise_var",
                  "width", "scale", "theta"}},
      {"testchannels", {"channel", "var", "width", "sweep"}},
      {"estimators", {"rule", "r"}},
      {"harness", {"L_grid"}},
      {"quantizer", {"policy", "step"}},
      {"bounds", {"residual_tolerance"}},
      {"acceptance", {"slope_min", "slope_max", "beta_min", "beta_max", "gap_max"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class Entries {
 public:
  explicit Entries(const std::map<std::string, std::string>& m) : m_(m) {}

  bool has(const std::string& key) const { return m_.count(key) != 0; }

  const std::string& text(const std::string& key) const {
    const auto it = m_.find(key);
    if (it == m_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
  }

  std::string text_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  double number(const std::string& key) const { return parse_double(key, text(key)); }
  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  std::optional<double> optional_number(const std::string& key) const {
    return has(key) ? std::optional<double>(number(key)) : std::nullopt;
  }

  std::uint64_t integer_or(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    return parse_uint(key, text(key));
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError("'" + key + "' must list at least one value");
    return out;
  }

  static double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) {
      throw ConfigError("'" + key + "' is not a number: '" + v + "'");
    }
    return out;
  }

  static std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) {
      throw ConfigError("'" + key + "' is not a non-negative integer: '" + v + "'");
    }
    return out;
  }

 private:
  const std::map<std::string, std::string>& m_;
};

models::SourceSpec make_source(const Entries& e) {
  const std::string kind = e.text_or("models.source", "gaussian");
  if (kind == "gaussian") {
    return models::SourceSpec::gaussian(e.number_or("models.source_mean", 0.0), e.number_or("models.source_var", 1.0));
  }
  if (kind == "uniform") {
    return models::SourceSpec::uniform(e.number_or("models.source_lo", 0.0), e.number_or("models.source_hi", 1.0));
  }
  throw ConfigError("unknown source family '" + kind + "'");
}

models::ObservationSpec make_observation(const Entries& e) {
  const std::string kind = e.text("models.observation");
  if (kind == "additive_gaussian") return models::ObservationSpec::additive_gaussian(e.number("models.noise_var"));
  if (kind == "additive_uniform") return models::ObservationSpec::additive_uniform(e.number("models.width"));
  if (kind == "additive_logistic") return models::ObservationSpec::additive_logistic(e.number("models.scale"));
  if (kind == "copula_clayton") return models::ObservationSpec::clayton(e.number("models.theta"));
  if (kind == "uniform_scale") return models::ObservationSpec::uniform_scale();
  throw ConfigError("unknown observation kind '" + kind + "'");
}

testchannels::TestChannelSpec make_channel(const std::string& kind, std::optional<double> param) {
  auto need = [&](const char* what) {
    if (!param) throw ConfigError(std::string("test channel '") + kind + "' needs '" + what + "'");
    return *param;
  };
  if (kind == "additive_gaussian") return testchannels::TestChannelSpec::additive_gaussian(need("var"));
  if (kind == "additive_uniform") return testchannels::TestChannelSpec::additive_uniform(need("width"));
  if (kind == "identity") return testchannels::TestChannelSpec::identity();
  if (kind == "independent") return testchannels::TestChannelSpec::independent();
  throw ConfigError("unknown test channel '" + kind + "'");
}

}  // namespace

std::string config_hash(const std::map<std::string, std::string>& entries) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : entries) {
    const std::string line = k + "=" + v + "\n";
    for (unsigned char c : line) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LoadedConfig parse(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  LoadedConfig out;
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) throw ConfigError("key '" + section + "' must live inside a section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (it->second.count(key) == 0) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      out.entries[section + "." + key] = trim(value.get_value<std::string>());
    }
  }
  out.hash = config_hash(out.entries);

  const Entries e(out.entries);
  auto& x = out.experiment;
  x.name = e.text_or("experiment.name", "experiment");
  x.seed = e.integer_or("experiment.seed", x.seed);
  x.trials = static_cast<std::size_t>(e.integer_or("experiment.trials", x.trials));
  x.threads = static_cast<std::size_t>(e.integer_or("experiment.threads", x.threads));

  x.model = models::JointModel(make_source(e), make_observation(e));

  out.has_channel = e.has("testchannels.channel");
  if (out.has_channel) {
    const std::string kind = e.text("testchannels.channel");
    std::optional<double> param = e.optional_number("testchannels.var");
    if (!param) param = e.optional_number("testchannels.width");
    if (e.has("testchannels.sweep")) {
      const auto values = e.list("testchannels.sweep");
      x.channel_sweep.clear();
      for (double v : values) x.channel_sweep.push_back(make_channel(kind, v));
      if (!param) param = values.back();
    }
    x.channel = make_channel(kind, param);
  } else if (e.has("testchannels.var") || e.has("testchannels.width") || e.has("testchannels.sweep")) {
    throw ConfigError("[testchannels] needs 'channel'");
  }

  x.rule = estimators::parse_rule(e.text_or("estimators.rule", "median"));
  x.r = e.number_or("estimators.r", 2.0);

  if (e.has("harness.L_grid")) {
    x.L_grid.clear();
    for (double v : e.list("harness.L_grid")) {
      if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("L_grid entries must be positive integers");
      x.L_grid.push_back(static_cast<std::size_t>(v));
    }
  }

  const std::string policy = e.text_or("quantizer.policy", "auto");
  if (policy == "auto") {
    x.quantizer.mode = harness::QuantizerPolicy::Mode::automatic;
  } else if (policy == "off") {
    x.quantizer.mode = harness::QuantizerPolicy::Mode::disabled;
  } else if (policy == "fixed") {
    x.quantizer.mode = harness::QuantizerPolicy::Mode::fixed;
    x.quantizer.step = e.number("quantizer.step");
  } else {
    throw ConfigError("unknown quantizer policy '" + policy + "'");
  }

  out.residual_tolerance = e.number_or("bounds.residual_tolerance", out.residual_tolerance);
  out.thresholds.slope_min = e.optional_number("acceptance.slope_min");
  out.thresholds.slope_max = e.optional_number("acceptance.slope_max");
  out.thresholds.beta_min = e.optional_number("acceptance.beta_min");
  out.thresholds.beta_max = e.optional_number("acceptance.beta_max");
  out.thresholds.gap_max = e.optional_number("acceptance.gap_max");
  return out;
}

LoadedConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse(in);
}

}  // namespace ceo::config
