#pragma once

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qcs::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kValidation = 2,
  kNonConvergence = 3,
  kUsage = 64,
};

/// Parses `args` (without the program name), runs the subcommand and writes
/// the JSON run record to `out` (or the --out file). Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Serialized run record as emitted (one JSON document plus newline).
std::string dump_record(const nlohmann::json& record);

}  // namespace qcs::cli
