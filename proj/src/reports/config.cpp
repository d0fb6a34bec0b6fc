#include "reports/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

namespace symland {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

long parse_int(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("bad " + what + ": '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("bad " + what + ": '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("bad " + what + ": '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("bad " + what + ": '" + s + "'");
  return v;
}

}  // namespace

std::vector<int> parse_ladder(const std::string& spec) {
  const std::string s = trim(spec);
  std::vector<int> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const long a = parse_int(trim(s.substr(0, dots)), "ladder");
    const long b = parse_int(trim(s.substr(dots + 2)), "ladder");
    if (b < a) throw UsageError("empty ladder range: " + s);
    for (long d = a; d <= b; ++d) out.push_back(static_cast<int>(d));
  } else {
    for (const auto& tok : split_list(s)) out.push_back(static_cast<int>(parse_int(tok, "ladder")));
  }
  if (out.empty()) throw UsageError("empty ladder");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1) throw UsageError("ladder entries must be positive");
    if (i > 0 && out[i] <= out[i - 1]) throw UsageError("ladder must be strictly increasing: " + s);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) out.push_back(parse_real(tok, "number"));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

void set_config_key(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "command") {
    cfg.command = v;
  } else if (key == "families" || key == "family") {
    cfg.families = split_list(v);
  } else if (key == "d") {
    cfg.d_ladder = parse_ladder(v);
  } else if (key == "kernel") {
    cfg.kernel = v;
  } else if (key == "tol") {
    cfg.tol = parse_real(v, "tol");
  } else if (key == "seed") {
    const long s = parse_int(v, "seed");
    if (s < 0) throw UsageError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "out") {
    cfg.out = v;
  } else if (key == "format") {
    if (v == "json") cfg.format = OutputFormat::Json;
    else if (v == "csv") cfg.format = OutputFormat::Csv;
    else throw UsageError("format must be json or csv");
  } else if (key == "pattern") {
    cfg.pattern = v;
  } else if (key == "depth") {
    cfg.depth = static_cast<int>(parse_int(v, "depth"));
  } else if (key == "r") {
    cfg.r_grid = parse_real_list(v);
  } else if (key == "restarts") {
    cfg.restarts = static_cast<int>(parse_int(v, "restarts"));
  } else if (key == "hessian_cap") {
    cfg.hessian_cap = static_cast<int>(parse_int(v, "hessian_cap"));
  } else {
    throw UsageError("unknown config key: " + key);
  }
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_key(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_text(cfg, ss.str());
}

void validate(const RunConfig& cfg) {
  static const std::vector<std::string> commands{"verify", "spectrum", "puiseux", "radial", "sphere-min", "report"};
  if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
    throw UsageError("unknown command: " + cfg.command);
  if (!(cfg.tol > 0)) throw UsageError("tol must be positive");
  if (cfg.kernel != "frobenius" && cfg.kernel != "gauss") throw UsageError("kernel must be frobenius or gauss");
  if (cfg.depth < 1 || cfg.depth > 8) throw UsageError("depth must be in 1..8");
  if (cfg.restarts < 1) throw UsageError("restarts must be >= 1");
  if (cfg.hessian_cap < 1) throw UsageError("hessian_cap must be >= 1");
  for (double r : cfg.r_grid)
    if (!(r > 0)) throw UsageError("radii must be positive");
  for (std::size_t i = 1; i < cfg.d_ladder.size(); ++i)
    if (cfg.d_ladder[i] <= cfg.d_ladder[i - 1]) throw UsageError("ladder must be strictly increasing");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  sq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace symland
