// Command-line front end. Talks to the library only through the C interface.
#include "symland/symland.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
  void operator()(symland_config* c) const { symland_config_free(c); }
};

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symland: critical points of symmetric order-3 tensor decomposition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(symland_version()));

  std::string config_path;
  std::map<std::string, std::string> flags;
  std::vector<std::string> families;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file; flags override it");
    sub->add_option_function<std::string>("--d", [&](const std::string& v) { flags["d"] = v; }, "ladder: a..b or a,b,c");
    sub->add_option_function<std::string>("--kernel", [&](const std::string& v) { flags["kernel"] = v; })
        ->check(CLI::IsMember({"frobenius", "gauss"}));
    sub->add_option_function<std::string>("--tol", [&](const std::string& v) { flags["tol"] = v; });
    sub->add_option_function<std::string>("--seed", [&](const std::string& v) { flags["seed"] = v; });
    sub->add_option_function<std::string>("--out", [&](const std::string& v) { flags["out"] = v; });
    sub->add_option_function<std::string>("--format", [&](const std::string& v) { flags["format"] = v; })
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option_function<std::string>("--restarts", [&](const std::string& v) { flags["restarts"] = v; });
    sub->add_option_function<std::string>("--hessian-cap", [&](const std::string& v) { flags["hessian_cap"] = v; });
  };

  auto* verify = app.add_subcommand("verify", "construct families, check criticality and loss formulas");
  auto* spectrum = app.add_subcommand("spectrum", "Hessian spectra against the predicted tables");
  auto* puiseux = app.add_subcommand("puiseux", "leading exponents and Puiseux series for a pattern");
  auto* radial = app.add_subcommand("radial", "saddle certification by sphere minimisation");
  auto* sphere = app.add_subcommand("sphere-min", "minimum of the loss on a sphere about a family point");
  auto* report = app.add_subcommand("report", "loss/d against index/d^2 over a catalog");
  for (auto* s : {verify, spectrum, radial, sphere, report}) s->add_option("families", families, "family names");
  for (auto* s : {verify, spectrum, puiseux, radial, sphere, report}) add_common(s);
  for (auto* s : {puiseux, sphere})
    s->add_option_function<std::string>("--pattern", [&](const std::string& v) { flags["pattern"] = v; });
  puiseux->add_option_function<std::string>("--depth", [&](const std::string& v) { flags["depth"] = v; });
  for (auto* s : {radial, sphere})
    s->add_option_function<std::string>("--r", [&](const std::string& v) { flags["r"] = v; }, "radii, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  symland_config* raw = nullptr;
  if (symland_config_new(&raw) != SYMLAND_OK) {
    std::cerr << "error: " << symland_last_error() << "\n";
    return 1;
  }
  std::unique_ptr<symland_config, ConfigDeleter> cfg(raw);

  auto set = [&](const std::string& k, const std::string& v) {
    if (symland_config_set(cfg.get(), k.c_str(), v.c_str()) != SYMLAND_OK) {
      std::cerr << "error: " << symland_last_error() << "\n";
      return false;
    }
    return true;
  };
  if (!config_path.empty() && symland_config_load_file(cfg.get(), config_path.c_str()) != SYMLAND_OK) {
    std::cerr << "error: " << symland_last_error() << "\n";
    return 2;
  }
  if (!set("command", app.get_subcommands().front()->get_name())) return 2;
  if (!families.empty() && !set("families", join(families))) return 2;
  for (const auto& [k, v] : flags)
    if (!set(k, v)) return 2;

  char* out = nullptr;
  int code = 2;
  const symland_status st = symland_run(cfg.get(), &out, &code);
  if (st != SYMLAND_OK) {
    std::cerr << "error: " << symland_last_error() << "\n";
    return code == 2 ? 2 : 1;
  }
  std::unique_ptr<char, void (*)(char*)> text(out, symland_string_free);
  if (*symland_config_output_path(cfg.get()) == '\0') std::fputs(text.get(), stdout);
  return code;
}
