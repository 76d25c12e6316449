#include "output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ceo_tools/cli.hpp"
#include "json.hpp"

namespace ceo::cli {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string distortion_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os << "L,R_sum_nats,r,estimator,D_hat,ci_lo,ci_hi,seed\n";
  for (const auto& row : rows) {
    os << row.L << ',' << fmt_number(row.r_sum_nats) << ',' << fmt_number(row.r) << ',' << row.estimator << ','
       << fmt_number(row.d_hat.mean) << ',' << fmt_number(row.d_hat.lo()) << ',' << fmt_number(row.d_hat.hi()) << ','
       << row.seed << '\n';
  }
  return os.str();
}

std::string equivalence_csv(const std::vector<harness::EquivalenceRow>& rows, std::uint64_t seed) {
  std::ostringstream os;
  os << "L,D_Q,D_Log,gap,epi_holds,D_Q_mc,ci_lo,ci_hi,seed\n";
  for (const auto& row : rows) {
    os << row.L << ',' << fmt_number(row.d_q) << ',' << fmt_number(row.d_log) << ',' << fmt_number(row.gap) << ','
       << (row.epi_holds ? 1 : 0) << ',' << fmt_number(row.d_q_monte_carlo.mean) << ','
       << fmt_number(row.d_q_monte_carlo.lo()) << ',' << fmt_number(row.d_q_monte_carlo.hi()) << ',' << seed
       << '\n';
  }
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << contents;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["schema_version"] = kJsonSchemaVersion;
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["config_hash"] = m.config_hash;
  j["tool_version"] = m.tool_version;
  j["seed"] = m.seed;
  j["started_utc"] = m.started_utc;
  j["finished_utc"] = m.finished_utc;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

}  // namespace ceo::cli
