#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ceo/harness.hpp"

namespace ceo::cli {

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_hash;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::string> outputs;
};

std::string utc_now();

/// printf-style "%.12g"; the CSV number format.
std::string fmt_number(double v);

struct CsvRow {
  std::size_t L = 0;
  double r_sum_nats = 0.0;
  double r = 0.0;
  std::string estimator;
  numerics::BatchMeansEstimate d_hat;
  std::uint64_t seed = 0;
};

std::string distortion_csv(const std::vector<CsvRow>& rows);
std::string equivalence_csv(const std::vector<harness::EquivalenceRow>& rows, std::uint64_t seed);

void write_file(const std::filesystem::path& path, const std::string& contents);
std::string manifest_json(const RunManifest& m);

}  // namespace ceo::cli
