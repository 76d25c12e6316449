#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ceo::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidConfig = 2,
  kPrecondition = 3,
  kThresholdViolation = 4,
};

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr int kJsonSchemaVersion = 1;

/// Entry point shared by the ceo binary and the tests. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ceo::cli
