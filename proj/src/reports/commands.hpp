#pragma once

#include "reports/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace symland {

inline constexpr int kSchemaVersion = 1;

struct CommandResult {
  nlohmann::ordered_json report;
  std::vector<std::vector<std::string>> csv;  // first row is the header
  int exit_code = 0;                          // 0 pass, 1 a verification failed
};

// Throws UsageError for bad configuration or unknown families.
CommandResult run_command(const RunConfig& cfg);

std::string render(const CommandResult& r, OutputFormat f);

}  // namespace symland
