#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace symland {

// Bad flags, bad config keys, unknown families: exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { Json, Csv };

struct RunConfig {
  std::string command;
  std::vector<std::string> families;
  std::vector<int> d_ladder;
  std::string kernel = "frobenius";
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::string out;  // empty: stdout
  OutputFormat format = OutputFormat::Json;
  std::string pattern;              // puiseux, sphere-min
  int depth = 4;                    // puiseux
  std::vector<double> r_grid;       // radial, sphere-min
  int restarts = 16;
  int hessian_cap = 16384;
};

// "a..b" or "a,b,c"; must be strictly increasing and positive.
std::vector<int> parse_ladder(const std::string& s);
std::vector<double> parse_real_list(const std::string& s);

// key = value lines, '#' comments; unknown keys are usage errors.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::string& path);
void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

void validate(const RunConfig& cfg);

// Seed for task number `stream`, independent of the order tasks run in.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace symland
