#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "ceo/harness.hpp"

namespace ceo::config {

/// Optional pass bands checked by the scaling and equivalence commands.
struct Thresholds {
  std::optional<double> slope_min;
  std::optional<double> slope_max;
  std::optional<double> beta_min;
  std::optional<double> beta_max;
  std::optional<double> gap_max;
};

struct LoadedConfig {
  harness::ExperimentConfig experiment;
  bool has_channel = false;
  Thresholds thresholds;
  double residual_tolerance = 1e-6;
  /// Every "section.key" -> trimmed value, as read.
  std::map<std::string, std::string> entries;
  /// FNV-1a 64 over the sorted "section.key=value" lines, hex.
  std::string hash;
};

/// Parses the INI-style experiment file. Unknown sections or keys, missing
/// required keys and malformed numbers raise ConfigError.
LoadedConfig parse(std::istream& in);
LoadedConfig load(const std::string& path);

std::string config_hash(const std::map<std::string, std::string>& entries);

}  // namespace ceo::config
